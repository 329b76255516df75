#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "ambient/fft.hpp"

using namespace ambient;

namespace {

// Textbook O(n^2) DFT in extended precision; the oracle for everything below.
std::vector<std::complex<long double>> brute_dft(const std::vector<std::complex<long double>>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<long double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<long double> acc = 0;
        for (std::size_t j = 0; j < n; ++j) {
            const long double angle = -2.0L * std::numbers::pi_v<long double> * static_cast<long double>((j * k) % n) /
                                      static_cast<long double>(n);
            acc += x[j] * std::complex<long double>(std::cos(angle), std::sin(angle));
        }
        out[k] = acc;
    }
    return out;
}

std::vector<double> random_signal(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> x(n);
    for (double& v : x) v = d(rng);
    return x;
}

double max_rfft_error(const std::vector<double>& x) {
    std::vector<std::complex<long double>> xc(x.begin(), x.end());
    const auto ref = brute_dft(xc);
    const auto got = rfft(x);
    EXPECT_EQ(got.size(), x.size() / 2 + 1);
    double err = 0.0;
    for (std::size_t k = 0; k < got.size(); ++k) {
        const auto d = std::complex<long double>(got[k].real(), got[k].imag()) - ref[k];
        err = std::max(err, static_cast<double>(std::abs(d)));
    }
    return err;
}

}  // namespace

TEST(Rfft, MatchesDirectDftOnModelWindow) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) EXPECT_LT(max_rfft_error(random_signal(180, seed)), 1e-9);
}

TEST(Rfft, MatchesDirectDftOnManyLengths) {
    for (std::size_t n = 1; n <= 70; ++n) EXPECT_LT(max_rfft_error(random_signal(n, n)), 1e-9) << "n=" << n;
    for (std::size_t n : {90u, 128u, 181u, 210u, 256u, 360u, 1024u, 997u})
        EXPECT_LT(max_rfft_error(random_signal(n, n)), 1e-9) << "n=" << n;
}

TEST(Fft, ComplexMatchesDirectDft) {
    for (std::size_t n : {1u, 2u, 3u, 12u, 45u, 49u, 64u, 90u, 101u}) {
        std::mt19937_64 rng(n);
        std::uniform_real_distribution<double> d(-1.0, 1.0);
        std::vector<Complex> x(n);
        for (auto& v : x) v = {d(rng), d(rng)};
        std::vector<std::complex<long double>> xl(x.begin(), x.end());
        const auto ref = brute_dft(xl);
        const auto got = fft(x);
        for (std::size_t k = 0; k < n; ++k)
            EXPECT_LT(std::abs(std::complex<long double>(got[k].real(), got[k].imag()) - ref[k]), 1e-9L);
    }
}

TEST(Rfft, Parseval) {
    for (std::size_t n : {180u, 64u, 90u, 77u}) {
        const auto x = random_signal(n, 99 + n);
        const auto spec = rfft(x);
        double time_energy = 0.0;
        for (double v : x) time_energy += v * v;
        double freq_energy = 0.0;
        for (std::size_t k = 0; k < spec.size(); ++k) {
            // Interior bins stand for a conjugate pair.
            const bool paired = k != 0 && !(n % 2 == 0 && k == n / 2);
            freq_energy += (paired ? 2.0 : 1.0) * std::norm(spec[k]);
        }
        freq_energy /= static_cast<double>(n);
        EXPECT_NEAR(freq_energy / time_energy, 1.0, 1e-9) << "n=" << n;
    }
}

TEST(Rfft, LinearityAndTone) {
    const auto a = random_signal(180, 1), b = random_signal(180, 2);
    std::vector<double> mix(180);
    for (std::size_t i = 0; i < 180; ++i) mix[i] = 2.0 * a[i] - 0.5 * b[i];
    const auto fa = rfft(a), fb = rfft(b), fm = rfft(mix);
    for (std::size_t k = 0; k < fm.size(); ++k) EXPECT_LT(std::abs(fm[k] - (2.0 * fa[k] - 0.5 * fb[k])), 1e-9);

    // Unit cosine at bin 10: magnitude sqrt(n)/2 after 1/sqrt(n) scaling.
    std::vector<double> tone(180);
    for (std::size_t i = 0; i < 180; ++i) tone[i] = std::cos(2.0 * std::numbers::pi * 10.0 * i / 180.0);
    const auto mag = magnitude_spectrum(tone);
    ASSERT_EQ(mag.size(), 91u);
    for (std::size_t k = 0; k < mag.size(); ++k)
        EXPECT_NEAR(mag[k], k == 10 ? std::sqrt(180.0) / 2.0 : 0.0, 1e-9) << "bin " << k;
}

TEST(Rfft, EmptyInputIsAnError) { EXPECT_THROW(rfft(std::vector<double>{}), ArgumentError); }
