#include "pulsegraph/butterworth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace pulsegraph {

namespace {

using cplx = std::complex<double>;

struct Zpk {
  std::vector<cplx> zeros;
  std::vector<cplx> poles;
};

std::vector<cplx> prototype_poles(int order) {
  std::vector<cplx> p;
  p.reserve(order);
  for (int k = 0; k < order; ++k) {
    const double theta = std::numbers::pi * (2.0 * k + order + 1) / (2.0 * order);
    p.emplace_back(std::cos(theta), std::sin(theta));
  }
  return p;
}

double prewarp(double f_hz, double fs) { return 2.0 * fs * std::tan(std::numbers::pi * f_hz / fs); }

// Bilinear map of an analog zpk; zeros at infinity land on z = -1.
Zpk bilinear(const Zpk& analog, double fs) {
  const double fs2 = 2.0 * fs;
  Zpk out;
  for (const auto& z : analog.zeros) out.zeros.push_back((fs2 + z) / (fs2 - z));
  for (const auto& p : analog.poles) out.poles.push_back((fs2 + p) / (fs2 - p));
  const auto at_infinity = analog.poles.size() - analog.zeros.size();
  out.zeros.insert(out.zeros.end(), at_infinity, cplx(-1.0, 0.0));
  return out;
}

SosMatrix to_sos(const Zpk& d) {
  constexpr double kImagTol = 1e-12;
  std::vector<std::pair<cplx, cplx>> pole_pairs;
  std::vector<double> real_poles;
  for (const auto& p : d.poles) {
    if (std::abs(p.imag()) <= kImagTol * std::max(1.0, std::abs(p)))
      real_poles.push_back(p.real());
    else if (p.imag() > 0)
      pole_pairs.emplace_back(p, std::conj(p));
  }
  std::sort(real_poles.begin(), real_poles.end());
  for (std::size_t i = 0; i + 1 < real_poles.size(); i += 2)
    pole_pairs.emplace_back(real_poles[i], real_poles[i + 1]);
  const bool odd = real_poles.size() % 2 == 1;

  // Interleave zeros at +1 and -1 so every band-pass section gets one of each.
  std::vector<double> plus, minus;
  for (const auto& z : d.zeros) (z.real() > 0 ? plus : minus).push_back(z.real());
  std::vector<double> zeros;
  for (std::size_t i = 0; i < std::max(plus.size(), minus.size()); ++i) {
    if (i < plus.size()) zeros.push_back(plus[i]);
    if (i < minus.size()) zeros.push_back(minus[i]);
  }

  const Eigen::Index n_sections = static_cast<Eigen::Index>(pole_pairs.size() + (odd ? 1 : 0));
  SosMatrix sos = SosMatrix::Zero(n_sections, 6);
  std::size_t zi = 0;
  for (Eigen::Index s = 0; s < static_cast<Eigen::Index>(pole_pairs.size()); ++s) {
    const auto [p1, p2] = pole_pairs[s];
    const double z1 = zi < zeros.size() ? zeros[zi++] : 0.0;
    const double z2 = zi < zeros.size() ? zeros[zi++] : 0.0;
    sos.row(s) << 1.0, -(z1 + z2), z1 * z2, 1.0, -(p1 + p2).real(), (p1 * p2).real();
  }
  if (odd) {
    const double z1 = zi < zeros.size() ? zeros[zi++] : 0.0;
    sos.row(n_sections - 1) << 1.0, -z1, 0.0, 1.0, -real_poles.back(), 0.0;
  }
  return sos;
}

SosMatrix normalize_at(SosMatrix sos, double freq_hz, double fs) {
  const double g = std::abs(sos_response(sos, freq_hz, fs));
  sos.row(0).head<3>() /= g;
  return sos;
}

}  // namespace

SosMatrix butter_lowpass(int order, double cutoff_hz, double fs) {
  const double wc = prewarp(cutoff_hz, fs);
  Zpk analog;
  for (const auto& p : prototype_poles(order)) analog.poles.push_back(p * wc);
  return normalize_at(to_sos(bilinear(analog, fs)), 0.0, fs);
}

SosMatrix butter_highpass(int order, double cutoff_hz, double fs) {
  const double wc = prewarp(cutoff_hz, fs);
  Zpk analog;
  for (const auto& p : prototype_poles(order)) {
    analog.poles.push_back(wc / p);
    analog.zeros.emplace_back(0.0, 0.0);
  }
  return normalize_at(to_sos(bilinear(analog, fs)), fs / 2.0, fs);
}

SosMatrix butter_bandpass(int order, double low_hz, double high_hz, double fs) {
  const double w1 = prewarp(low_hz, fs);
  const double w2 = prewarp(high_hz, fs);
  const double bw = w2 - w1;
  const double w0 = std::sqrt(w1 * w2);
  Zpk analog;
  for (const auto& p : prototype_poles(order)) {
    const cplx half = p * bw / 2.0;
    const cplx root = std::sqrt(half * half - w0 * w0);
    analog.poles.push_back(half + root);
    analog.poles.push_back(half - root);
    analog.zeros.emplace_back(0.0, 0.0);
  }
  const double f0 = fs / std::numbers::pi * std::atan(w0 / (2.0 * fs));
  return normalize_at(to_sos(bilinear(analog, fs)), f0, fs);
}

std::complex<double> sos_response(const SosMatrix& sos, double freq_hz, double fs) {
  const cplx z1 = std::polar(1.0, -2.0 * std::numbers::pi * freq_hz / fs);
  const cplx z2 = z1 * z1;
  cplx h(1.0, 0.0);
  for (Eigen::Index s = 0; s < sos.rows(); ++s) {
    const auto r = sos.row(s);
    h *= (r(0) + r(1) * z1 + r(2) * z2) / (r(3) + r(4) * z1 + r(5) * z2);
  }
  return h;
}

namespace {

// DF2T pass in place; `state` holds (z1, z2) per section.
void run_sections(const SosMatrix& sos, Eigen::Ref<Eigen::VectorXd> x,
                  Eigen::Matrix<double, Eigen::Dynamic, 2>& state) {
  for (Eigen::Index s = 0; s < sos.rows(); ++s) {
    const double b0 = sos(s, 0), b1 = sos(s, 1), b2 = sos(s, 2);
    const double a1 = sos(s, 4), a2 = sos(s, 5);
    double z1 = state(s, 0), z2 = state(s, 1);
    for (Eigen::Index n = 0; n < x.size(); ++n) {
      const double in = x[n];
      const double y = b0 * in + z1;
      z1 = b1 * in - a1 * y + z2;
      z2 = b2 * in - a2 * y;
      x[n] = y;
    }
    state(s, 0) = z1;
    state(s, 1) = z2;
  }
}

// State of each section after an infinitely long unit step.
Eigen::Matrix<double, Eigen::Dynamic, 2> step_state(const SosMatrix& sos) {
  Eigen::Matrix<double, Eigen::Dynamic, 2> zi(sos.rows(), 2);
  double input = 1.0;
  for (Eigen::Index s = 0; s < sos.rows(); ++s) {
    const auto r = sos.row(s);
    const double dc = (r(0) + r(1) + r(2)) / (1.0 + r(4) + r(5));
    const double y = dc * input;
    zi(s, 0) = y - r(0) * input;
    zi(s, 1) = r(2) * input - r(5) * y;
    input = y;
  }
  return zi;
}

}  // namespace

Eigen::VectorXd sos_filter(const SosMatrix& sos, const Eigen::Ref<const Eigen::VectorXd>& x) {
  Eigen::VectorXd y = x;
  Eigen::Matrix<double, Eigen::Dynamic, 2> state = Eigen::Matrix<double, Eigen::Dynamic, 2>::Zero(sos.rows(), 2);
  run_sections(sos, y, state);
  return y;
}

Eigen::VectorXd sos_filtfilt(const SosMatrix& sos, const Eigen::Ref<const Eigen::VectorXd>& x,
                             Eigen::Index pad) {
  const Eigen::Index n = x.size();
  if (n == 0) return x;
  pad = std::clamp<Eigen::Index>(pad, 0, n - 1);

  Eigen::VectorXd ext(n + 2 * pad);
  for (Eigen::Index k = 0; k < pad; ++k) {
    ext[k] = 2.0 * x[0] - x[pad - k];
    ext[n + pad + k] = 2.0 * x[n - 1] - x[n - 2 - k];
  }
  ext.segment(pad, n) = x;

  const auto zi = step_state(sos);
  Eigen::Matrix<double, Eigen::Dynamic, 2> state = zi * ext[0];
  run_sections(sos, ext, state);
  ext.reverseInPlace();
  state = zi * ext[0];
  run_sections(sos, ext, state);
  ext.reverseInPlace();
  return ext.segment(pad, n);
}

Eigen::Index settling_length(const SosMatrix& sos, double tol) {
  double r_max = 0.0;
  for (Eigen::Index s = 0; s < sos.rows(); ++s) {
    const double a1 = sos(s, 4), a2 = sos(s, 5);
    const cplx disc = std::sqrt(cplx(a1 * a1 - 4.0 * a2, 0.0));
    r_max = std::max({r_max, std::abs((-a1 + disc) / 2.0), std::abs((-a1 - disc) / 2.0)});
  }
  if (r_max <= 0.0) return 1;
  if (r_max >= 1.0) return std::numeric_limits<Eigen::Index>::max() / 4;
  return static_cast<Eigen::Index>(std::ceil(std::log(tol) / std::log(r_max)));
}

}  // namespace pulsegraph
