#include "swnoon/optics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <unordered_set>

#include "swnoon/io.hpp"

namespace swnoon {

namespace {

double factorial(int n) {
    static const auto table = [] {
        std::array<double, 64> t{};
        t[0] = 1.0;
        for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] * static_cast<double>(i);
        return t;
    }();
    return table.at(static_cast<std::size_t>(n));
}

// Enumerates compositions of n into k nonnegative parts.
void for_each_composition(int n, int k, std::vector<int>& buf,
                          const std::function<void(const std::vector<int>&)>& fn, int pos = 0) {
    if (pos == k - 1) {
        buf[pos] = n;
        fn(buf);
        return;
    }
    for (int v = 0; v <= n; ++v) {
        buf[pos] = v;
        for_each_composition(n - v, k, buf, fn, pos + 1);
    }
}

}  // namespace

void OpticalElement::validate() const {
    const auto k = static_cast<Eigen::Index>(modes.size());
    if (k == 0) throw std::invalid_argument("OpticalElement '" + name + "': no modes");
    if (matrix.rows() != k || matrix.cols() != k) {
        throw std::invalid_argument("OpticalElement '" + name + "': matrix shape mismatch");
    }
    std::unordered_set<std::string> seen;
    for (const auto& m : modes) {
        if (!seen.insert(m).second) {
            throw std::invalid_argument("OpticalElement '" + name + "': duplicate mode " + m);
        }
    }
    const Eigen::MatrixXcd gram = matrix.adjoint() * matrix;
    const double dev = (gram - Eigen::MatrixXcd::Identity(k, k)).cwiseAbs().maxCoeff();
    if (dev > kUnitaryTol) {
        throw std::invalid_argument("OpticalElement '" + name + "': matrix is not unitary (max dev " +
                                    format_g17(dev) + ")");
    }
}

void DetectionNetwork::validate() const {
    std::unordered_set<std::string> photonic(photonic_modes.begin(), photonic_modes.end());
    for (const auto& e : elements) {
        e.validate();
        for (const auto& m : e.modes) {
            if (!photonic.count(m)) {
                throw std::invalid_argument("network '" + name + "': element mode " + m +
                                            " missing from photonic_modes");
            }
        }
    }
    std::unordered_set<std::string> labels, det_modes;
    for (const auto& d : detectors) {
        if (!labels.insert(d.label).second) {
            throw std::invalid_argument("network '" + name + "': duplicate detector " + d.label);
        }
        if (!det_modes.insert(d.mode).second) {
            throw std::invalid_argument("network '" + name + "': detector mode " + d.mode +
                                        " used twice");
        }
        if (!photonic.count(d.mode)) {
            throw std::invalid_argument("network '" + name + "': detector mode " + d.mode +
                                        " missing from photonic_modes");
        }
    }
}

const DetectorPort& DetectionNetwork::detector(const std::string& label) const {
    for (const auto& d : detectors) {
        if (d.label == label) return d;
    }
    throw std::invalid_argument("network '" + name + "': unknown detector " + label);
}

bool DetectionNetwork::is_photonic(const std::string& mode) const {
    return std::find(photonic_modes.begin(), photonic_modes.end(), mode) != photonic_modes.end();
}

FockVector apply_element(const FockVector& state, const OpticalElement& element) {
    element.validate();
    const int k = static_cast<int>(element.modes.size());
    std::vector<std::size_t> mode_ids(element.modes.size());
    for (std::size_t j = 0; j < element.modes.size(); ++j) {
        mode_ids[j] = state.layout().mode_index(element.modes[j]);
    }

    const int cutoff = state.cutoff();
    FockVector out(state.layout());
    auto& dst = out.amplitudes();
    const auto& in = state.amplitudes();

    // per-basis-ket expansion of prod_j (sum_k U(j,k) b†_k)^{n_j}
    std::map<std::vector<int>, Complex> poly, next;
    std::vector<int> comp(k);
    for (std::size_t i = 0; i < in.size(); ++i) {
        const Complex c = in[i];
        if (c == Complex{}) continue;
        auto occ = state.occupation_of(i);

        poly.clear();
        poly[std::vector<int>(k, 0)] = Complex{1.0, 0.0};
        double norm_in = 1.0;
        for (int j = 0; j < k; ++j) {
            const int n = occ[mode_ids[j]];
            norm_in *= factorial(n);
            if (n == 0) continue;
            next.clear();
            for_each_composition(n, k, comp, [&](const std::vector<int>& m) {
                double multi = factorial(n);
                Complex term{multi, 0.0};
                for (int q = 0; q < k; ++q) {
                    term /= factorial(m[q]);
                    for (int r = 0; r < m[q]; ++r) term *= element.matrix(j, q);
                }
                if (term == Complex{}) return;
                for (const auto& [mt, pc] : poly) {
                    std::vector<int> nt(mt);
                    for (int q = 0; q < k; ++q) nt[q] += m[q];
                    next[nt] += pc * term;
                }
            });
            poly.swap(next);
        }

        for (const auto& [mt, coeff] : poly) {
            bool over = false;
            double norm_out = 1.0;
            for (int q = 0; q < k; ++q) {
                if (mt[q] > cutoff) {
                    over = true;
                    break;
                }
                norm_out *= factorial(mt[q]);
            }
            if (over) continue;  // dropped weight is accounted for below
            auto occ_out = occ;
            for (int q = 0; q < k; ++q) occ_out[mode_ids[q]] = mt[q];
            dst[out.index_of(occ_out)] += c * coeff * std::sqrt(norm_out / norm_in);
        }
    }

    // the exact map is unitary, so the cutoff loss is the norm deficit
    const double loss = state.norm2() - out.norm2();
    out.add_truncation_loss(state.truncation_loss() + std::max(0.0, loss));
    return out;
}

FockVector apply_network(const FockVector& state, const DetectionNetwork& network) {
    network.validate();
    FockVector out = state;
    for (const auto& e : network.elements) out = apply_element(out, e);
    return out;
}

OpticalElement hwp(double angle_rad, const std::string& h_mode, const std::string& v_mode) {
    if (h_mode == v_mode) throw std::invalid_argument("hwp: H and V labels must differ");
    const double c = std::cos(2.0 * angle_rad);
    const double s = std::sin(2.0 * angle_rad);
    OpticalElement e;
    e.name = "HWP";
    e.modes = {h_mode, v_mode};
    e.matrix = Eigen::MatrixXcd(2, 2);
    e.matrix << c, s, s, -c;
    return e;
}

OpticalElement phase_shifter(int j, int n, const std::string& v_mode) {
    if (n < 1 || j < 1 || j > n) throw std::invalid_argument("phase_shifter: need 1 <= j <= N");
    const double arg = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    OpticalElement e;
    e.name = "PS_" + std::to_string(j);
    e.modes = {v_mode};
    e.matrix = Eigen::MatrixXcd(1, 1);
    e.matrix(0, 0) = -std::exp(Complex{0.0, arg});
    return e;
}

OpticalElement beam_splitter(double reflectivity, const std::string& mode1,
                             const std::string& mode2, const std::string& name) {
    if (reflectivity < 0.0 || reflectivity > 1.0) {
        throw std::invalid_argument("beam_splitter: reflectivity outside [0,1]");
    }
    const double t = std::sqrt(1.0 - reflectivity);
    const Complex r{0.0, std::sqrt(reflectivity)};
    OpticalElement e;
    e.name = name;
    e.modes = {mode1, mode2};
    e.matrix = Eigen::MatrixXcd(2, 2);
    e.matrix << Complex{t, 0.0}, r, r, Complex{t, 0.0};
    return e;
}

OpticalElement beam_splitter_pol(double reflectivity, const std::string& main_h,
                                 const std::string& main_v, const std::string& tap_h,
                                 const std::string& tap_v, const std::string& name) {
    const double t = std::sqrt(1.0 - reflectivity);
    const Complex r{0.0, std::sqrt(reflectivity)};
    OpticalElement e;
    e.name = name;
    e.modes = {main_h, main_v, tap_h, tap_v};
    e.matrix = Eigen::MatrixXcd::Zero(4, 4);
    e.matrix(0, 0) = t;
    e.matrix(0, 2) = r;
    e.matrix(2, 0) = r;
    e.matrix(2, 2) = t;
    e.matrix(1, 1) = t;
    e.matrix(1, 3) = r;
    e.matrix(3, 1) = r;
    e.matrix(3, 3) = t;
    return e;
}

OpticalElement mode_phase(double phi, const std::string& mode, const std::string& name) {
    OpticalElement e;
    e.name = name;
    e.modes = {mode};
    e.matrix = Eigen::MatrixXcd(1, 1);
    e.matrix(0, 0) = std::exp(Complex{0.0, phi});
    return e;
}

DetectionNetwork stokes_analyzer() {
    DetectionNetwork net;
    net.name = "stokes_analyzer";
    net.elements = {hwp(std::numbers::pi / 8.0, kStokesH, kStokesV)};
    net.detectors = {{"D_S1", kStokesH}, {"D_S2", kStokesV}};
    net.photonic_modes = {kStokesH, kStokesV};
    net.validate();
    return net;
}

DetectionNetwork anti_stokes_analyzer(double phi_stab) {
    DetectionNetwork net;
    net.name = "anti_stokes_analyzer";
    if (phi_stab != 0.0) {
        net.elements.push_back(mode_phase(phi_stab, kAsV, "PROP_PHASE"));
    }
    net.elements.push_back(hwp(std::numbers::pi / 8.0, kAsH, kAsV));
    net.detectors = {{"D_AS1", kAsH}, {"D_AS2", kAsV}};
    net.photonic_modes = {kAsH, kAsV};
    net.validate();
    return net;
}

std::vector<std::string> noon_rail_labels(int n) {
    std::vector<std::string> labels;
    for (int j = 2; j <= n; ++j) {
        labels.push_back("R" + std::to_string(j) + "_H");
        labels.push_back("R" + std::to_string(j) + "_V");
    }
    return labels;
}

DetectionNetwork noon_network(int n) {
    if (n < 1) throw std::invalid_argument("noon_network: N must be >= 1");
    DetectionNetwork net;
    net.name = "noon_network_" + std::to_string(n);
    net.photonic_modes = {kStokesH, kStokesV};
    for (const auto& m : noon_rail_labels(n)) net.photonic_modes.push_back(m);

    auto rail_h = [&](int j) { return j == 1 ? std::string(kStokesH) : "R" + std::to_string(j) + "_H"; };
    auto rail_v = [&](int j) { return j == 1 ? std::string(kStokesV) : "R" + std::to_string(j) + "_V"; };

    // BS_{j-1} (reflectivity 1/j) taps rail j off the main beam; after the
    // chain the main beam itself is rail 1, so every rail carries 1/N.
    for (int j = n; j >= 2; --j) {
        net.elements.push_back(beam_splitter_pol(1.0 / static_cast<double>(j), kStokesH, kStokesV,
                                                 rail_h(j), rail_v(j),
                                                 "BS_" + std::to_string(j - 1)));
    }
    for (int j = 1; j <= n; ++j) {
        net.elements.push_back(phase_shifter(j, n, rail_v(j)));
    }
    // PBS±: rotate (+,−) content onto (H,V); D_j watches the transmitted |+>
    // port, the reflected |−> port is undetected.
    for (int j = 1; j <= n; ++j) {
        auto pbs = hwp(std::numbers::pi / 8.0, rail_h(j), rail_v(j));
        pbs.name = "PBSpm_" + std::to_string(j);
        net.elements.push_back(pbs);
        net.detectors.push_back({"D_" + std::to_string(j), rail_h(j)});
    }
    net.validate();
    return net;
}

std::string describe_network(const DetectionNetwork& network) {
    std::ostringstream os;
    os << "network " << network.name << '\n';
    for (const auto& e : network.elements) {
        os << "element " << e.name << " modes";
        for (const auto& m : e.modes) os << ' ' << m;
        os << '\n';
        for (Eigen::Index r = 0; r < e.matrix.rows(); ++r) {
            for (Eigen::Index c = 0; c < e.matrix.cols(); ++c) {
                if (c) os << ' ';
                os << format_g17(e.matrix(r, c).real()) << (e.matrix(r, c).imag() < 0 ? "-" : "+")
                   << format_g17(std::abs(e.matrix(r, c).imag())) << 'i';
            }
            os << '\n';
        }
        os << '\n';
    }
    os << "detectors";
    for (const auto& d : network.detectors) os << ' ' << d.label << ':' << d.mode;
    os << '\n';
    return os.str();
}

}  // namespace swnoon
