#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "tfridge/spectral.hpp"
#include "tfridge/synth.hpp"

using namespace tfridge;

namespace {

TimeSeries tone(double omega, double t_end, double dt) {
  const auto n = static_cast<std::size_t>(t_end / dt) + 1;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = std::sin(omega * static_cast<double>(i) * dt);
  return TimeSeries(TimeGrid(0.0, dt, n), std::move(v));
}

ToyParams paper_toy(double mu2) {
  ToyParams p;
  p.components = {{20.0, 20.0, 4.0}, {50.0, mu2, 4.0}, {80.0, 170.0, 4.0}};
  return p;
}

}  // namespace

TEST_CASE("spectrum axis is one-sided and increasing") {
  const Spectrum sp = dft_magnitude(tone(2.0, 10.0, 0.05), 1);
  REQUIRE(sp.freqs.size() == sp.mags.size());
  CHECK(sp.freqs.front() == 0.0);
  for (std::size_t i = 1; i < sp.freqs.size(); ++i)
    CHECK(sp.freqs[i] > sp.freqs[i - 1]);
  const double nyquist = std::numbers::pi / 0.05;
  CHECK(sp.freqs.back() == Catch::Approx(nyquist));
}

TEST_CASE("pure tone peaks at its own bin") {
  // 10 full periods of omega = 2*pi over [0, 10): n = 128 samples, no padding
  const double dt = 10.0 / 128.0;
  std::vector<double> v(128);
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = std::sin(2.0 * std::numbers::pi * static_cast<double>(i) * dt);
  const Spectrum sp = dft_magnitude(TimeSeries(TimeGrid(0.0, dt, 128), std::move(v)), 1);
  std::size_t argmax = 0;
  for (std::size_t i = 1; i < sp.mags.size(); ++i)
    if (sp.mags[i] > sp.mags[argmax]) argmax = i;
  CHECK(sp.freqs[argmax] == Catch::Approx(2.0 * std::numbers::pi));
  // off-bin leakage vanishes for an integer number of periods
  CHECK(sp.mags[argmax - 1] < 1e-10);
}

TEST_CASE("Parseval holds for the internal transform scaling") {
  const TimeSeries ts = tone(3.7, 25.0, 0.1);
  double sum_t = 0.0;
  for (double v : ts.values()) sum_t += v * v;
  sum_t *= ts.grid().dt();

  // reconstruct the two-sided sum from the one-sided magnitudes: interior
  // bins appear twice, DC and Nyquist once
  const Spectrum sp = dft_magnitude(ts, 1);
  const std::size_t n_pad = 2 * (sp.freqs.size() - 1);
  double sum_f = 0.0;
  for (std::size_t i = 0; i < sp.mags.size(); ++i) {
    const double w = (i == 0 || i + 1 == sp.mags.size()) ? 1.0 : 2.0;
    sum_f += w * sp.mags[i] * sp.mags[i];
  }
  sum_f /= ts.grid().dt() * static_cast<double>(n_pad);
  CHECK(sum_f == Catch::Approx(sum_t).epsilon(1e-6));
}

TEST_CASE("zero padding refines the frequency axis") {
  const TimeSeries ts = tone(5.0, 20.0, 0.1);
  const Spectrum sp1 = dft_magnitude(ts, 1);
  const Spectrum sp4 = dft_magnitude(ts, 4);
  CHECK(sp4.freqs.size() >= 4 * (sp1.freqs.size() - 1));
  CHECK(sp4.freqs[1] == Catch::Approx(sp1.freqs[1] / 4.0));
}

TEST_CASE("toy A and toy B spectra are nearly identical") {
  const TimeGrid grid(0.0, 0.005, 50001);
  const Spectrum a = dft_magnitude(gen_toy_signal(paper_toy(80.0), grid));
  const Spectrum b = dft_magnitude(gen_toy_signal(paper_toy(25.0), grid));

  const auto pa = top_peaks(a, 3, 5.0);
  const auto pb = top_peaks(b, 3, 5.0);
  REQUIRE(pa.size() == 3);
  REQUIRE(pb.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(pa[i].first == Catch::Approx(pb[i].first).epsilon(0.02));
    CHECK(pa[i].second == Catch::Approx(pb[i].second).epsilon(0.02));
  }
  // the three peaks sit at the toy component frequencies
  std::vector<double> freqs = {pa[0].first, pa[1].first, pa[2].first};
  std::sort(freqs.begin(), freqs.end());
  CHECK(freqs[0] == Catch::Approx(20.0).epsilon(0.01));
  CHECK(freqs[1] == Catch::Approx(50.0).epsilon(0.01));
  CHECK(freqs[2] == Catch::Approx(80.0).epsilon(0.01));
}

TEST_CASE("top_peaks breaks magnitude ties toward lower frequency") {
  Spectrum sp;
  sp.freqs = {0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0};
  sp.mags = {0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0};
  const auto peaks = top_peaks(sp, 1, 1.0);
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0].first == 10.0);
}

TEST_CASE("top_peaks enforces the separation rule") {
  Spectrum sp;
  sp.freqs = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
  sp.mags = {0.0, 3.0, 0.5, 2.9, 0.0, 2.0, 0.0};
  const auto peaks = top_peaks(sp, 3, 3.0);
  REQUIRE(peaks.size() == 2);  // the 2.9 peak at f=3 is within 3.0 of f=1
  CHECK(peaks[0].first == 1.0);
  CHECK(peaks[1].first == 5.0);
}

TEST_CASE("flat zero spectrum yields no peaks") {
  Spectrum sp;
  sp.freqs = {0.0, 1.0, 2.0, 3.0};
  sp.mags = {0.0, 0.0, 0.0, 0.0};
  CHECK(top_peaks(sp, 3, 0.5).empty());
}

TEST_CASE("Hann window suppresses leakage for off-bin tones") {
  // tone between bins: strong leakage without a window
  const double dt = 0.1;
  const std::size_t n = 200;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = std::sin(3.3 * static_cast<double>(i) * dt);
  const TimeSeries ts(TimeGrid(0.0, dt, n), std::move(v));
  const Spectrum raw = dft_magnitude(ts, 4, Window::none);
  const Spectrum han = dft_magnitude(ts, 4, Window::hann);

  auto mag_far = [](const Spectrum& sp) {
    // magnitude two octaves above the tone, pure leakage
    double m = 0.0;
    for (std::size_t i = 0; i < sp.freqs.size(); ++i)
      if (sp.freqs[i] > 13.0 && sp.freqs[i] < 14.0) m = std::max(m, sp.mags[i]);
    return m;
  };
  CHECK(mag_far(han) < mag_far(raw));
}
