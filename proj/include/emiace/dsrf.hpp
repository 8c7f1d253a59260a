#pragma once

#include <span>
#include <vector>

#include "emiace/types.hpp"

namespace emiace {

/// How an evaluation frequency f maps to the omega in the relaxation model:
/// `angular` uses omega = 2*pi*f, `plain` uses omega = f. The choice only
/// rescales the dictionary along the relaxation-frequency axis.
enum class OmegaConvention { angular, plain };

/// Relaxation-frequency response model
///   H(omega) = c0 + sum_k c_k / (1 + j*omega / zeta_k).
struct RelaxationModel {
  double shift_c0 = 0.0;
  std::vector<double> amplitudes_ck;
  std::vector<double> relaxation_freqs_zeta;  // Hz, strictly positive
  int model_order_L = 0;

  /// Throws std::invalid_argument if the field lengths disagree with the
  /// model order or any relaxation frequency is non-positive.
  void validate() const;
};

struct DictionaryAtom {
  int id = 0;
  double relaxation_freq_hz = 0.0;
  std::vector<Complex> raw_response;  // one value per operating frequency
  FeatureVector feature;              // filled by normalize_dictionary
};

/// Ordered set of normalized target signatures.
struct Dictionary {
  std::vector<double> operating_freqs_hz;
  std::vector<DictionaryAtom> atoms;
};

/// `count` frequencies with a constant ratio between neighbors; the two
/// endpoints are set exactly. count == 1 is the documented degenerate case
/// and returns {f_min}.
std::vector<double> log_spaced(int count, double f_min, double f_max);

/// Evaluates H at a signed omega (rad/s under the angular convention).
Complex dsrf_response_at_omega(const RelaxationModel& model, double omega);

/// Evaluates H at each frequency in Hz, mapping f -> omega per `conv`.
std::vector<Complex> dsrf_response(const RelaxationModel& model,
                                   std::span<const double> eval_freqs_hz,
                                   OmegaConvention conv = OmegaConvention::angular);

/// Default sensor operating frequencies: 21 log-spaced, 300 Hz to 90 kHz.
std::vector<double> default_operating_freqs();

/// Builds the dictionary: one single-relaxation atom (c0 = 0, c1 = 1) per
/// relaxation frequency from log_spaced(atom_count, zeta_min, zeta_max),
/// evaluated at the operating frequencies and normalized.
Dictionary build_dictionary(std::vector<double> operating_freqs_hz,
                            int atom_count, double zeta_min, double zeta_max,
                            OmegaConvention conv = OmegaConvention::angular);

/// build_dictionary with the default 21 operating frequencies and the
/// standard 100-atom sweep from 45 Hz to 670 kHz.
Dictionary default_dictionary();

}  // namespace emiace
