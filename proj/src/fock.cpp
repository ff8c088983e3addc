#include "swnoon/fock.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <sstream>
#include <unordered_set>

#include "swnoon/io.hpp"

namespace swnoon {

namespace {

constexpr std::size_t kMaxBasisSize = std::size_t{1} << 27;

std::size_t pow_size(std::size_t base, std::size_t exp) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        if (r > kMaxBasisSize / base) {
            throw std::invalid_argument("ModeLayout: basis size exceeds the dense-storage limit");
        }
        r *= base;
    }
    return r;
}

}  // namespace

std::size_t ModeLayout::dim() const {
    return pow_size(static_cast<std::size_t>(cutoff) + 1, modes.size());
}

std::size_t ModeLayout::mode_index(const std::string& label) const {
    for (std::size_t i = 0; i < modes.size(); ++i) {
        if (modes[i] == label) return i;
    }
    throw std::invalid_argument("unknown mode label: " + label);
}

bool ModeLayout::has_mode(const std::string& label) const {
    return std::find(modes.begin(), modes.end(), label) != modes.end();
}

void ModeLayout::validate() const {
    if (modes.empty()) throw std::invalid_argument("ModeLayout: no modes");
    if (cutoff < 1) throw std::invalid_argument("ModeLayout: cutoff must be >= 1");
    std::unordered_set<std::string> seen;
    for (const auto& m : modes) {
        if (m.empty()) throw std::invalid_argument("ModeLayout: empty mode label");
        if (!seen.insert(m).second) {
            throw std::invalid_argument("ModeLayout: duplicate mode label: " + m);
        }
    }
    (void)dim();  // storage guard
}

FockVector::FockVector(ModeLayout layout) : layout_(std::move(layout)) {
    layout_.validate();
    amps_.assign(layout_.dim(), Complex{0.0, 0.0});
}

Complex FockVector::amp(const std::vector<int>& occ) const { return amps_[index_of(occ)]; }

void FockVector::set_amp(const std::vector<int>& occ, Complex value) {
    amps_[index_of(occ)] = value;
}

std::vector<int> FockVector::occupation_of(std::size_t index) const {
    const std::size_t base = static_cast<std::size_t>(layout_.cutoff) + 1;
    std::vector<int> occ(layout_.modes.size());
    for (std::size_t k = layout_.modes.size(); k-- > 0;) {
        occ[k] = static_cast<int>(index % base);
        index /= base;
    }
    return occ;
}

std::size_t FockVector::index_of(const std::vector<int>& occ) const {
    if (occ.size() != layout_.modes.size()) {
        throw std::invalid_argument("occupation tuple length mismatch");
    }
    const std::size_t base = static_cast<std::size_t>(layout_.cutoff) + 1;
    std::size_t idx = 0;
    for (int n : occ) {
        if (n < 0 || n > layout_.cutoff) throw std::out_of_range("occupation outside cutoff");
        idx = idx * base + static_cast<std::size_t>(n);
    }
    return idx;
}

double FockVector::norm2() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return s;
}

double FockVector::norm() const { return std::sqrt(norm2()); }

FockVector FockVector::normalized() const {
    const double n = norm();
    if (n < 1e-150) throw std::domain_error("cannot normalize a zero state");
    FockVector out(layout_);
    for (std::size_t i = 0; i < amps_.size(); ++i) out.amps_[i] = amps_[i] / n;
    out.trunc_loss_ = 0.0;
    return out;
}

FockVector FockVector::from_terms(
    const ModeLayout& layout,
    const std::vector<std::pair<std::vector<int>, Complex>>& terms) {
    FockVector out(layout);
    for (const auto& [occ, a] : terms) out.set_amp(occ, a);
    return out;
}

FockVector vacuum(const ModeLayout& layout) {
    FockVector out(layout);
    out.amplitudes()[0] = Complex{1.0, 0.0};
    return out;
}

FockVector create(const FockVector& state, const std::string& mode) {
    const std::size_t k = state.layout().mode_index(mode);
    const int cutoff = state.cutoff();
    const std::size_t base = static_cast<std::size_t>(cutoff) + 1;
    // stride of mode k in the lexicographic index
    std::size_t stride = 1;
    for (std::size_t j = state.num_modes() - 1; j > k; --j) stride *= base;

    FockVector out(state.layout());
    double dropped = 0.0;
    const auto& in = state.amplitudes();
    auto& dst = out.amplitudes();
    for (std::size_t i = 0; i < in.size(); ++i) {
        const Complex a = in[i];
        if (a == Complex{}) continue;
        const int n = static_cast<int>((i / stride) % base);
        if (n == cutoff) {
            dropped += std::norm(a);
            continue;
        }
        dst[i + stride] += a * std::sqrt(static_cast<double>(n) + 1.0);
    }
    out.add_truncation_loss(state.truncation_loss() + dropped);
    return out;
}

FockVector annihilate(const FockVector& state, const std::string& mode) {
    const std::size_t k = state.layout().mode_index(mode);
    const std::size_t base = static_cast<std::size_t>(state.cutoff()) + 1;
    std::size_t stride = 1;
    for (std::size_t j = state.num_modes() - 1; j > k; --j) stride *= base;

    FockVector out(state.layout());
    const auto& in = state.amplitudes();
    auto& dst = out.amplitudes();
    for (std::size_t i = 0; i < in.size(); ++i) {
        const Complex a = in[i];
        if (a == Complex{}) continue;
        const int n = static_cast<int>((i / stride) % base);
        if (n == 0) continue;
        dst[i - stride] += a * std::sqrt(static_cast<double>(n));
    }
    out.add_truncation_loss(state.truncation_loss());
    return out;
}

FockVector tensor(const FockVector& s1, const FockVector& s2) {
    if (s1.cutoff() != s2.cutoff()) {
        throw std::invalid_argument("tensor: cutoffs differ between layouts");
    }
    for (const auto& m : s2.layout().modes) {
        if (s1.layout().has_mode(m)) {
            throw std::invalid_argument("tensor: overlapping mode label: " + m);
        }
    }
    ModeLayout merged;
    merged.cutoff = s1.cutoff();
    merged.modes = s1.layout().modes;
    merged.modes.insert(merged.modes.end(), s2.layout().modes.begin(), s2.layout().modes.end());

    FockVector out(merged);
    const auto& a1 = s1.amplitudes();
    const auto& a2 = s2.amplitudes();
    auto& dst = out.amplitudes();
    const std::size_t d2 = a2.size();
    for (std::size_t i = 0; i < a1.size(); ++i) {
        if (a1[i] == Complex{}) continue;
        for (std::size_t j = 0; j < d2; ++j) {
            if (a2[j] == Complex{}) continue;
            dst[i * d2 + j] = a1[i] * a2[j];
        }
    }
    out.add_truncation_loss(s1.truncation_loss() + s2.truncation_loss());
    return out;
}

FockVector reorder_modes(const FockVector& state, const std::vector<std::string>& order) {
    if (order.size() != state.num_modes()) {
        throw std::invalid_argument("reorder_modes: mode count mismatch");
    }
    std::vector<std::size_t> src(order.size());
    for (std::size_t k = 0; k < order.size(); ++k) src[k] = state.layout().mode_index(order[k]);

    ModeLayout dst_layout{order, state.cutoff()};
    FockVector out(dst_layout);
    const auto& in = state.amplitudes();
    std::vector<int> occ_new(order.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
        if (in[i] == Complex{}) continue;
        const auto occ = state.occupation_of(i);
        for (std::size_t k = 0; k < order.size(); ++k) occ_new[k] = occ[src[k]];
        out.amplitudes()[out.index_of(occ_new)] = in[i];
    }
    out.add_truncation_loss(state.truncation_loss());
    return out;
}

FockVector rename_modes(const FockVector& state,
                        const std::vector<std::pair<std::string, std::string>>& renames) {
    ModeLayout layout = state.layout();
    for (const auto& [from, to] : renames) {
        layout.modes[layout.mode_index(from)] = to;
    }
    layout.validate();
    FockVector out(layout);
    out.amplitudes() = state.amplitudes();
    out.add_truncation_loss(state.truncation_loss());
    return out;
}

FockVector extend_with_vacuum(const FockVector& state, const std::vector<std::string>& labels) {
    if (labels.empty()) return state;
    ModeLayout extra{labels, state.cutoff()};
    return tensor(state, vacuum(extra));
}

std::complex<double> inner_product(const FockVector& s1, const FockVector& s2) {
    if (!(s1.layout() == s2.layout())) {
        throw std::invalid_argument("inner_product: mismatched layouts");
    }
    Complex acc{0.0, 0.0};
    const auto& a = s1.amplitudes();
    const auto& b = s2.amplitudes();
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
    return acc;
}

double fidelity(const FockVector& s1, const FockVector& s2) {
    const double n1 = s1.norm2();
    const double n2 = s2.norm2();
    if (n1 < 1e-300 || n2 < 1e-300) {
        throw std::domain_error("fidelity: zero state");
    }
    return std::norm(inner_product(s1, s2)) / (n1 * n2);
}

FockVector canonical_phase(const FockVector& state) {
    const auto& a = state.amplitudes();
    std::size_t imax = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double m = std::abs(a[i]);
        if (m > best + 1e-300 && m > best) {
            best = m;
            imax = i;
        }
    }
    if (best <= 0.0) return state;
    const Complex phase = a[imax] / std::abs(a[imax]);
    FockVector out(state.layout());
    for (std::size_t i = 0; i < a.size(); ++i) out.amplitudes()[i] = a[i] / phase;
    out.add_truncation_loss(state.truncation_loss());
    return out;
}

std::string serialize_state(const FockVector& state) {
    std::ostringstream os;
    os << "# modes=";
    const auto& modes = state.layout().modes;
    for (std::size_t k = 0; k < modes.size(); ++k) {
        if (k) os << ',';
        os << modes[k];
    }
    os << " cutoff=" << state.cutoff() << '\n';
    const auto& a = state.amplitudes();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == Complex{}) continue;
        const auto occ = state.occupation_of(i);
        for (std::size_t k = 0; k < occ.size(); ++k) {
            if (k) os << ',';
            os << occ[k];
        }
        os << '\t' << format_g17(a[i].real()) << '\t' << format_g17(a[i].imag()) << '\n';
    }
    return os.str();
}

FockVector parse_state(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw std::invalid_argument("parse_state: empty input");
    const auto mpos = header.find("modes=");
    const auto cpos = header.find("cutoff=");
    if (mpos == std::string::npos || cpos == std::string::npos) {
        throw std::invalid_argument("parse_state: malformed header");
    }
    std::string mode_list = header.substr(mpos + 6, header.find(' ', mpos) - (mpos + 6));
    ModeLayout layout;
    layout.cutoff = std::stoi(header.substr(cpos + 7));
    std::stringstream ms(mode_list);
    std::string tok;
    while (std::getline(ms, tok, ',')) layout.modes.push_back(tok);

    FockVector out(layout);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto t1 = line.find('\t');
        const auto t2 = line.find('\t', t1 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos) {
            throw std::invalid_argument("parse_state: malformed line: " + line);
        }
        std::vector<int> occ;
        std::stringstream os_(line.substr(0, t1));
        while (std::getline(os_, tok, ',')) occ.push_back(std::stoi(tok));
        const double re = std::stod(line.substr(t1 + 1, t2 - t1 - 1));
        const double im = std::stod(line.substr(t2 + 1));
        out.set_amp(occ, Complex{re, im});
    }
    return out;
}

FockVector parse_state(const std::string& text) {
    std::istringstream is(text);
    return parse_state(is);
}

}  // namespace swnoon
