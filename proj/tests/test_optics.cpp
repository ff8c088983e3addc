#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "swnoon/optics.hpp"
#include "swnoon/rng.hpp"
#include "swnoon/source_herald.hpp"

using namespace swnoon;

namespace {

FockVector random_state(const ModeLayout& layout, std::uint64_t seed) {
    RngStream rng(seed);
    FockVector s(layout);
    for (auto& a : s.amplitudes()) a = Complex{rng.uniform() - 0.5, rng.uniform() - 0.5};
    return s.normalized();
}

int total_photons(const FockVector& s, std::size_t index) {
    int n = 0;
    for (int v : s.occupation_of(index)) n += v;
    return n;
}

}  // namespace

TEST_CASE("identity element leaves states unchanged") {
    ModeLayout layout{{"a", "b"}, 3};
    const auto s = random_state(layout, 1);
    OpticalElement id;
    id.name = "ID";
    id.modes = {"a", "b"};
    id.matrix = Eigen::MatrixXcd::Identity(2, 2);
    const auto out = apply_element(s, id);
    for (std::size_t i = 0; i < s.dim(); ++i) {
        CHECK(std::abs(out.amp(i) - s.amp(i)) < 1e-12);
    }
}

TEST_CASE("apply_element rejects non-unitary matrices and unknown modes") {
    ModeLayout layout{{"a", "b"}, 2};
    OpticalElement bad;
    bad.name = "BAD";
    bad.modes = {"a", "b"};
    bad.matrix = Eigen::MatrixXcd::Identity(2, 2) * 1.01;
    CHECK_THROWS_AS(apply_element(vacuum(layout), bad), std::invalid_argument);

    auto ok = hwp(0.1, "a", "zz");
    CHECK_THROWS_AS(apply_element(vacuum(layout), ok), std::invalid_argument);
}

TEST_CASE("Hong-Ou-Mandel: no coincidences behind a 50/50 splitter") {
    ModeLayout layout{{"a", "b"}, 2};
    const auto s11 = FockVector::from_terms(layout, {{{1, 1}, {1.0, 0.0}}});
    const auto out = apply_element(s11, beam_splitter(0.5, "a", "b"));
    // the |1,1> component interferes away; photons bunch 50/50
    CHECK(std::norm(out.amp({1, 1})) < 1e-12);
    CHECK(std::norm(out.amp({2, 0})) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::norm(out.amp({0, 2})) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(out.norm2() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hwp at 0 is diag(1,-1) and at 22.5 degrees the Hadamard") {
    const auto h0 = hwp(0.0, "h", "v");
    CHECK(std::abs(h0.matrix(0, 0) - Complex{1.0, 0.0}) < 1e-15);
    CHECK(std::abs(h0.matrix(1, 1) - Complex{-1.0, 0.0}) < 1e-15);
    CHECK(std::abs(h0.matrix(0, 1)) < 1e-15);

    const auto h = hwp(std::numbers::pi / 8.0, "h", "v");
    const double inv = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(h.matrix(0, 0) - Complex{inv, 0.0}) < 1e-12);
    CHECK(std::abs(h.matrix(0, 1) - Complex{inv, 0.0}) < 1e-12);
    CHECK(std::abs(h.matrix(1, 0) - Complex{inv, 0.0}) < 1e-12);
    CHECK(std::abs(h.matrix(1, 1) - Complex{-inv, 0.0}) < 1e-12);

    // single |H> photon measured in the +/- basis
    ModeLayout layout{{"h", "v"}, 1};
    const auto sh = FockVector::from_terms(layout, {{{1, 0}, {1.0, 0.0}}});
    const auto out = apply_element(sh, h);
    CHECK(std::norm(out.amp({1, 0})) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::norm(out.amp({0, 1})) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("hwp is unitary for any angle") {
    RngStream rng(7);
    for (int k = 0; k < 20; ++k) {
        const double angle = (rng.uniform() - 0.5) * 4.0 * std::numbers::pi;
        CHECK_NOTHROW(hwp(angle, "h", "v").validate());
    }
}

TEST_CASE("phase shifter examples") {
    // j=N: V multiplied by -1
    const auto ps_n = phase_shifter(3, 3, "v");
    CHECK(std::abs(ps_n.matrix(0, 0) - Complex{-1.0, 0.0}) < 1e-12);
    // N=2, j=1: -exp(i pi) = +1
    const auto ps_21 = phase_shifter(1, 2, "v");
    CHECK(std::abs(ps_21.matrix(0, 0) - Complex{1.0, 0.0}) < 1e-12);
    for (int j = 1; j <= 4; ++j) {
        const auto ps = phase_shifter(j, 4, "v");
        CHECK(std::abs(std::abs(ps.matrix(0, 0)) - 1.0) < 1e-12);
        CHECK_NOTHROW(ps.validate());
    }
    CHECK_THROWS_AS(phase_shifter(5, 4, "v"), std::invalid_argument);
}

TEST_CASE("constructed elements are unitary and conserve photon number") {
    ModeLayout layout{{kStokesH, kStokesV, "R2_H", "R2_V"}, 3};
    const auto s = random_state(layout, 42);
    const auto bs = beam_splitter_pol(1.0 / 3.0, kStokesH, kStokesV, "R2_H", "R2_V", "BS");
    CHECK_NOTHROW(bs.validate());
    const auto out = apply_element(s, bs);

    // norm + truncation loss preserved
    CHECK(out.norm2() + out.truncation_loss() ==
          doctest::Approx(s.norm2() + s.truncation_loss()).epsilon(1e-10));

    // per-total-photon-number weights unchanged (up to cutoff loss)
    std::vector<double> win(4 * 3 + 1, 0.0), wout(4 * 3 + 1, 0.0);
    for (std::size_t i = 0; i < s.dim(); ++i) {
        win[total_photons(s, i)] += std::norm(s.amp(i));
        wout[total_photons(out, i)] += std::norm(out.amp(i));
    }
    for (std::size_t n = 0; n < win.size(); ++n) {
        CHECK(wout[n] <= win[n] + 1e-10);
    }
}

TEST_CASE("noon_network(1) projects onto |H>-|V>") {
    const int cutoff = 2;
    const auto net = noon_network(1);
    REQUIRE(net.detectors.size() == 1);

    // one V photon correlated with SWa, one H with SWb
    ModeLayout layout{{kSWa, kSWb, kStokesH, kStokesV}, cutoff};
    const double inv = 1.0 / std::sqrt(2.0);
    const auto s = FockVector::from_terms(layout, {{{1, 0, 0, 1}, {inv, 0.0}},
                                                   {{0, 1, 1, 0}, {inv, 0.0}}});
    ClickPattern click;
    click.outcomes["D_1"] = 1;
    const auto res = herald(s, net, click);
    // <H - V| picks +|0,1> - |1,0>
    ModeLayout sw{{kSWa, kSWb}, cutoff};
    const auto expect = FockVector::from_terms(sw, {{{0, 1}, {inv, 0.0}}, {{1, 0}, {-inv, 0.0}}});
    CHECK(fidelity(res.state, expect) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(res.probability == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("noon networks match the direct NOON projector for N = 1..3") {
    const double chi = 0.05;
    for (int n = 1; n <= 3; ++n) {
        const int cutoff = std::max(n, 2);
        auto ws = write_state(WriteParams{chi, cutoff});
        const auto direct = project_noon(ws, n);

        const auto net = noon_network(n);
        ws = extend_with_vacuum(ws, noon_rail_labels(n));
        // exact-sector pattern: one photon per detector, nothing in the
        // undetected |-> ports
        ClickPattern pat;
        for (const auto& d : net.detectors) pat.outcomes[d.label] = 1;
        pat.outcomes[kStokesV] = 0;
        for (int j = 2; j <= n; ++j) pat.outcomes["R" + std::to_string(j) + "_V"] = 0;
        auto res_nr = herald(ws, net, pat, /*number_resolving=*/true);
        CHECK(fidelity(res_nr.state, direct.state) >= 1.0 - 1e-9);
    }
}

TEST_CASE("network dump lists elements and detectors") {
    const auto txt = describe_network(noon_network(2));
    CHECK(txt.find("BS_1") != std::string::npos);
    CHECK(txt.find("PS_1") != std::string::npos);
    CHECK(txt.find("PBSpm_2") != std::string::npos);
    CHECK(txt.find("D_1") != std::string::npos);
    CHECK(txt.find("D_2") != std::string::npos);
}
