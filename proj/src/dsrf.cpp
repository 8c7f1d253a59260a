#include "emiace/dsrf.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "emiace/preprocess.hpp"

namespace emiace {

void RelaxationModel::validate() const {
  if (model_order_L < 1) {
    throw std::invalid_argument("relaxation model order must be >= 1");
  }
  const auto order = static_cast<size_t>(model_order_L);
  if (amplitudes_ck.size() != order || relaxation_freqs_zeta.size() != order) {
    throw std::invalid_argument(
        "amplitude and relaxation frequency counts must equal the model order");
  }
  if (!std::isfinite(shift_c0)) {
    throw std::invalid_argument("relaxation model shift must be finite");
  }
  for (double c : amplitudes_ck) {
    if (!std::isfinite(c)) {
      throw std::invalid_argument("relaxation amplitudes must be finite");
    }
  }
  for (double z : relaxation_freqs_zeta) {
    if (!std::isfinite(z) || z <= 0.0) {
      throw std::invalid_argument("relaxation frequencies must be positive");
    }
  }
}

std::vector<double> log_spaced(int count, double f_min, double f_max) {
  if (count < 1) {
    throw std::invalid_argument("log_spaced requires count >= 1");
  }
  if (!(f_min > 0.0) || !(f_max > f_min)) {
    throw std::invalid_argument("log_spaced requires 0 < f_min < f_max");
  }
  if (count == 1) {
    return {f_min};  // degenerate ladder, single rung at the low end
  }
  std::vector<double> freqs(static_cast<size_t>(count));
  const double lo = std::log(f_min);
  const double step = (std::log(f_max) - lo) / (count - 1);
  for (int i = 0; i < count; ++i) {
    freqs[static_cast<size_t>(i)] = std::exp(lo + step * i);
  }
  freqs.front() = f_min;  // endpoints exact, interior keeps the constant ratio
  freqs.back() = f_max;
  return freqs;
}

Complex dsrf_response_at_omega(const RelaxationModel& model, double omega) {
  model.validate();
  Complex h(model.shift_c0, 0.0);
  for (int k = 0; k < model.model_order_L; ++k) {
    const auto idx = static_cast<size_t>(k);
    const Complex denom(1.0, omega / model.relaxation_freqs_zeta[idx]);
    h += model.amplitudes_ck[idx] / denom;
  }
  return h;
}

std::vector<Complex> dsrf_response(const RelaxationModel& model,
                                   std::span<const double> eval_freqs_hz,
                                   OmegaConvention convention) {
  model.validate();
  if (eval_freqs_hz.empty()) {
    throw std::invalid_argument("dsrf_response requires at least one frequency");
  }
  std::vector<Complex> out;
  out.reserve(eval_freqs_hz.size());
  for (double f : eval_freqs_hz) {
    if (!std::isfinite(f) || f < 0.0) {
      throw std::invalid_argument("evaluation frequencies must be >= 0");
    }
    const double omega =
        convention == OmegaConvention::angular ? 2.0 * std::numbers::pi * f : f;
    out.push_back(dsrf_response_at_omega(model, omega));
  }
  return out;
}

std::vector<double> default_operating_freqs() {
  return log_spaced(kNumFreqs, 300.0, 90000.0);
}

Dictionary build_dictionary(std::vector<double> operating_freqs_hz, int atom_count,
                            double zeta_min_hz, double zeta_max_hz,
                            OmegaConvention convention) {
  if (operating_freqs_hz.empty()) {
    throw std::invalid_argument("dictionary requires operating frequencies");
  }
  for (size_t i = 1; i < operating_freqs_hz.size(); ++i) {
    if (!(operating_freqs_hz[i] > operating_freqs_hz[i - 1])) {
      throw std::invalid_argument("operating frequencies must be strictly increasing");
    }
  }
  if (atom_count < 1) {
    throw std::invalid_argument("dictionary requires at least one atom");
  }

  const std::vector<double> zetas = log_spaced(atom_count, zeta_min_hz, zeta_max_hz);

  Dictionary dict;
  dict.operating_freqs_hz = std::move(operating_freqs_hz);
  dict.atoms.reserve(zetas.size());
  for (size_t i = 0; i < zetas.size(); ++i) {
    RelaxationModel model;
    model.shift_c0 = 0.0;
    model.amplitudes_ck = {1.0};
    model.relaxation_freqs_zeta = {zetas[i]};
    model.model_order_L = 1;

    DictionaryAtom atom;
    atom.id = static_cast<int>(i);
    atom.relaxation_freq_hz = zetas[i];
    atom.raw_response = dsrf_response(model, dict.operating_freqs_hz, convention);
    dict.atoms.push_back(std::move(atom));
  }
  return normalize_dictionary(std::move(dict));
}

Dictionary default_dictionary() {
  return build_dictionary(default_operating_freqs(), 100, 45.0, 670000.0,
                          OmegaConvention::angular);
}

}  // namespace emiace
