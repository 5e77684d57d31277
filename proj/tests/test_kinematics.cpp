#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "vdyn/kinematics.hpp"

using namespace vdyn;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

VowelToken make_token(const std::string& speaker, const std::string& id,
                      std::vector<Series> channels, std::vector<std::string> names,
                      double fs, double onset, double offset, double tail = 0.0) {
    VowelToken t;
    t.trajectory.sample_rate_hz = fs;
    t.trajectory.channel_names = std::move(names);
    t.trajectory.channels = std::move(channels);
    t.trajectory.speaker = speaker;
    t.trajectory.item = "item";
    t.trajectory.token_id = id;
    t.vowel_onset_s = onset;
    t.vowel_offset_s = offset;
    t.tail_s = tail;
    return t;
}

double interior_amplitude(const Series& y) {
    double a = 0.0;
    for (std::size_t i = y.size() / 4; i < 3 * y.size() / 4; ++i) a = std::max(a, std::abs(y[i]));
    return a;
}

}  // namespace

TEST_CASE("token validation enforces the analysis window") {
    Series flat(100, 0.5);
    auto tok = make_token("s", "t", {flat}, {"TDx"}, 100.0, 0.0, 0.5, 0.0);
    REQUIRE_NOTHROW(tok.validate());

    tok.tail_s = 0.075;
    tok.vowel_offset_s = 0.99;  // 0.99 samples end, but tail pushes past it
    REQUIRE_THROWS_AS(tok.validate(), validation_error);

    tok.tail_s = 0.0;
    tok.vowel_offset_s = 0.0;
    REQUIRE_THROWS_AS(tok.validate(), validation_error);

    tok.vowel_offset_s = 0.5;
    tok.trajectory.channels.front()[3] = std::nan("");
    REQUIRE_THROWS_AS(tok.validate(), validation_error);
}

TEST_CASE("z-scoring standardizes each speaker's pooled samples") {
    auto a = make_token("sp1", "a", {Series{1.0, 2.0, 3.0}}, {"TDx"}, 100.0, 0.0, 0.02);
    const auto out = zscore_by_speaker({a}, "TDx");
    const Series& z = out.front().trajectory.channel("TDx");
    REQUIRE(z[0] == Catch::Approx(-1.224744871391589).epsilon(0.0).margin(1e-12));
    REQUIRE(z[1] == Catch::Approx(0.0).margin(1e-12));
    REQUIRE(z[2] == Catch::Approx(1.224744871391589).epsilon(0.0).margin(1e-12));
}

TEST_CASE("z-scoring pools tokens within a speaker but not across speakers") {
    auto a = make_token("sp1", "a", {Series{0.0, 0.0, 0.0}}, {"TDx"}, 100.0, 0.0, 0.02);
    auto b = make_token("sp1", "b", {Series{2.0, 2.0, 2.0}}, {"TDx"}, 100.0, 0.0, 0.02);
    auto c = make_token("sp2", "c", {Series{9.0, 11.0, 10.0}}, {"TDx"}, 100.0, 0.0, 0.02);
    const auto out = zscore_by_speaker({a, b, c}, "TDx");

    // speaker 1 pooled: mean 1, sd 1 -> tokens map to -1 and +1
    REQUIRE(out[0].trajectory.channel("TDx")[0] == Catch::Approx(-1.0).margin(1e-12));
    REQUIRE(out[1].trajectory.channel("TDx")[0] == Catch::Approx(1.0).margin(1e-12));
    // speaker 2 standardized on its own: mean 10, population sd sqrt(2/3)
    REQUIRE(out[2].trajectory.channel("TDx")[1] ==
            Catch::Approx(1.224744871391589).epsilon(0.0).margin(1e-12));
}

TEST_CASE("z-scoring a zero-variance speaker fails and names the speaker") {
    auto a = make_token("flatling", "a", {Series{4.0, 4.0, 4.0}}, {"TDx"}, 100.0, 0.0, 0.02);
    try {
        zscore_by_speaker({a}, "TDx");
        FAIL("expected zero-variance rejection");
    } catch (const validation_error& e) {
        REQUIRE(std::string(e.what()).find("flatling") != std::string::npos);
    }
}

TEST_CASE("butterworth sections have unit DC gain and validate their design") {
    const auto sections = butterworth_lowpass(4, 10.0, 1000.0);
    REQUIRE(sections.size() == 2);
    double dc = 1.0;
    for (const auto& s : sections) dc *= s.dc_gain();
    REQUIRE(std::abs(dc - 1.0) < 1e-9);

    REQUIRE_THROWS_AS(butterworth_lowpass(3, 10.0, 1000.0), validation_error);
    REQUIRE_THROWS_AS(butterworth_lowpass(0, 10.0, 1000.0), validation_error);
    REQUIRE_THROWS_AS(butterworth_lowpass(4, 500.0, 1000.0), validation_error);
    REQUIRE_THROWS_AS(butterworth_lowpass(4, 0.0, 1000.0), validation_error);
}

TEST_CASE("zero-phase filtering is exact on constants and affine-linear") {
    const double fs = 1000.0;
    Series x(300);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double t = static_cast<double>(i) / fs;
        x[i] = std::sin(two_pi * 3.0 * t) + 0.4 * std::sin(two_pi * 7.0 * t);
    }

    const Series c = lowpass(Series(64, 2.5), fs);
    for (double v : c) REQUIRE(v == Catch::Approx(2.5).epsilon(0.0).margin(1e-9));

    const Series y = lowpass(x, fs);
    REQUIRE(y.size() == x.size());
    Series ax(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) ax[i] = 2.0 * x[i] + 3.0;
    const Series ay = lowpass(ax, fs);
    for (std::size_t i = 0; i < x.size(); ++i)
        REQUIRE(ay[i] == Catch::Approx(2.0 * y[i] + 3.0).epsilon(0.0).margin(1e-9));
}

TEST_CASE("filtering needs enough samples for its padding") {
    REQUIRE_THROWS_AS(lowpass(Series(11, 1.0), 1000.0), validation_error);
    REQUIRE_NOTHROW(lowpass(Series(12, 1.0), 1000.0));
    REQUIRE_THROWS_AS(lowpass(Series(64, 1.0), 15.0), validation_error);  // fs <= 2*cutoff
}

TEST_CASE("tone amplitudes follow the two-pass magnitude response") {
    const double fs = 1000.0;
    const auto tone_ratio = [&](double f) {
        Series x(2000);
        for (std::size_t i = 0; i < x.size(); ++i)
            x[i] = std::sin(two_pi * f * static_cast<double>(i) / fs);
        return interior_amplitude(lowpass(x, fs));
    };
    const auto two_pass = [](double f) { return 1.0 / (1.0 + std::pow(f / 10.0, 8.0)); };

    REQUIRE(std::abs(tone_ratio(1.0) - two_pass(1.0)) < 0.01);
    REQUIRE(std::abs(tone_ratio(10.0) - two_pass(10.0)) < 0.01);  // half power twice = 0.5
    REQUIRE(std::abs(tone_ratio(50.0) - two_pass(50.0)) < 0.01);
    REQUIRE(tone_ratio(50.0) < 0.03);  // more than 97% attenuated
}

TEST_CASE("central differences are exact on affine series") {
    const double fs = 250.0;
    Series x(50);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = 2.0 * static_cast<double>(i) / fs + 1.0;
    const Series v = central_difference(x, fs);
    for (double d : v) REQUIRE(d == Catch::Approx(2.0).epsilon(0.0).margin(1e-9));
}

TEST_CASE("circular motion has constant tangential speed") {
    const double fs = 1000.0, f = 2.0, w = two_pi * f;
    Series x(1001), y(1001);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double t = static_cast<double>(i) / fs;
        x[i] = std::cos(w * t);
        y[i] = std::sin(w * t);
    }
    const std::vector<Series> channels{x, y};
    const Series speed = tangential_velocity(channels, fs);

    // central difference of a sinusoid scales by sin(w h)/h, identically in
    // both channels, so the interior speed is exactly constant
    const double expected = std::sin(w / fs) * fs;
    double lo = speed[1], hi = speed[1];
    for (std::size_t i = 1; i + 1 < speed.size(); ++i) {
        lo = std::min(lo, speed[i]);
        hi = std::max(hi, speed[i]);
        REQUIRE(speed[i] == Catch::Approx(expected).epsilon(1e-9));
    }
    REQUIRE((hi - lo) / hi < 1e-6);
}

TEST_CASE("tangential velocity validates its channels") {
    const std::vector<Series> one{Series{1.0, 2.0, 3.0}};
    REQUIRE_THROWS_AS(tangential_velocity(one, 100.0), validation_error);
    const std::vector<Series> ragged{Series{1.0, 2.0, 3.0}, Series{1.0, 2.0}};
    REQUIRE_THROWS_AS(tangential_velocity(ragged, 100.0), validation_error);
}

TEST_CASE("displacement measures the 10-90% straight-line distance") {
    const double fs = 100.0;
    Series x(101), y(101);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = static_cast<double>(i) / fs;
        y[i] = 2.0 * static_cast<double>(i) / fs;
    }
    const auto tok = make_token("s", "t", {x, y}, {"TDx", "TDy"}, fs, 0.0, 1.0);
    const std::vector<std::string> names{"TDx", "TDy"};
    REQUIRE(euclidean_displacement(tok, names) ==
            Catch::Approx(0.8 * std::sqrt(5.0)).epsilon(0.0).margin(1e-9));

    const auto inner = make_token("s", "t", {x, y}, {"TDx", "TDy"}, fs, 0.05, 0.95);
    REQUIRE(euclidean_displacement(inner, names) ==
            Catch::Approx(0.72 * std::sqrt(5.0)).epsilon(0.0).margin(1e-9));

    const auto flat = make_token("s", "t", {Series(101, 0.3), Series(101, 0.7)},
                                 {"TDx", "TDy"}, fs, 0.0, 1.0);
    REQUIRE(euclidean_displacement(flat, names) == 0.0);
}

TEST_CASE("displacement rejects bad fractions and unknown channels") {
    const auto tok = make_token("s", "t", {Series(101, 0.3)}, {"TDx"}, 100.0, 0.0, 1.0);
    const std::vector<std::string> names{"TDx"};
    REQUIRE_THROWS_AS(euclidean_displacement(tok, names, 0.9, 0.1), validation_error);
    REQUIRE_THROWS_AS(euclidean_displacement(tok, names, 0.0, 0.9), validation_error);
    const std::vector<std::string> missing{"F1"};
    REQUIRE_THROWS_AS(euclidean_displacement(tok, missing), validation_error);
}

TEST_CASE("resampling preserves endpoints exactly and linearity everywhere") {
    Series ramp(11);
    for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = static_cast<double>(i);
    const Series up = resample_normalized(ramp, 101);
    REQUIRE(up.size() == 101);
    REQUIRE(up.front() == ramp.front());
    REQUIRE(up.back() == ramp.back());
    for (int j = 0; j < 101; ++j)
        REQUIRE(up[static_cast<std::size_t>(j)] ==
                Catch::Approx(10.0 * j / 100.0).epsilon(0.0).margin(1e-12));

    Series same(101);
    for (std::size_t i = 0; i < same.size(); ++i) same[i] = std::sin(0.1 * static_cast<double>(i));
    const Series id = resample_normalized(same, 101);
    for (std::size_t i = 0; i < same.size(); ++i) REQUIRE(id[i] == same[i]);

    const Series two = resample_normalized(ramp, 2);
    REQUIRE(two == Series{0.0, 10.0});

    REQUIRE_THROWS_AS(resample_normalized(Series{1.0}, 101), validation_error);
    REQUIRE_THROWS_AS(resample_normalized(ramp, 1), validation_error);
}

TEST_CASE("peak and trough detection uses topographic prominence") {
    const Series speed{0.0, 1.0, 0.2, 0.6, 0.0};
    const auto peaks = find_speed_peaks(speed, 0.05);
    REQUIRE(peaks.size() == 2);
    REQUIRE(peaks[0].index == 1);
    REQUIRE(peaks[0].prominence == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(peaks[1].index == 3);
    REQUIRE(peaks[1].prominence == Catch::Approx(0.4).margin(1e-12));

    const auto troughs = find_speed_minima(speed, 0.05);
    REQUIRE(troughs.size() == 1);
    REQUIRE(troughs[0].index == 2);
    REQUIRE(troughs[0].value == Catch::Approx(0.2).margin(1e-12));

    // prominence threshold filters the smaller peak
    const auto strict = find_speed_peaks(speed, 0.5);
    REQUIRE(strict.size() == 1);
    REQUIRE(strict[0].index == 1);
}

TEST_CASE("plateau peaks report their midpoint; edge plateaus are not peaks") {
    const Series plateau{0.0, 1.0, 1.0, 1.0, 0.0};
    const auto hits = find_speed_peaks(plateau, 0.05);
    REQUIRE(hits.size() == 1);
    REQUIRE(hits[0].index == 2);

    const Series edge{1.0, 1.0, 0.0, 2.0, 0.0};
    const auto hits2 = find_speed_peaks(edge, 0.05);
    REQUIRE(hits2.size() == 1);
    REQUIRE(hits2[0].index == 3);
}

TEST_CASE("window slicing keeps samples whose times lie inside the window") {
    Series x(101);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
    const Series w = slice_window(x, 100.0, 0.10, 0.20);
    REQUIRE(w.size() == 11);
    REQUIRE(w.front() == 10.0);
    REQUIRE(w.back() == 20.0);

    const Series clipped = slice_window(x, 100.0, 0.95, 2.0);
    REQUIRE(clipped.size() == 6);
    REQUIRE(clipped.back() == 100.0);

    REQUIRE_THROWS_AS(slice_window(x, 100.0, 0.5, 0.5), validation_error);
    REQUIRE_THROWS_AS(slice_window(x, 100.0, 1.5, 2.0), validation_error);
}
