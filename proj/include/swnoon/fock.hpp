// Truncated multimode bosonic Fock space: mode layouts, dense state vectors
// and elementary state algebra. Basis tuples are enumerated lexicographically
// following layout order, so serialized states are bit-reproducible.
#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace swnoon {

using Complex = std::complex<double>;

// Amplitude comparison tolerance; well above accumulated double rounding
// for the <= 8-mode states used here.
inline constexpr double kAmpTol = 1e-10;
inline constexpr double kNormTol = 1e-12;

// Canonical mode labels.
inline constexpr const char* kSWa = "SWa";
inline constexpr const char* kSWb = "SWb";
inline constexpr const char* kStokesH = "S_H";
inline constexpr const char* kStokesV = "S_V";
inline constexpr const char* kAsH = "AS_H";
inline constexpr const char* kAsV = "AS_V";

struct ModeLayout {
    std::vector<std::string> modes;  // ordered, unique labels
    int cutoff = 1;                  // max occupation per mode

    std::size_t dim() const;
    std::size_t mode_index(const std::string& label) const;  // throws on unknown label
    bool has_mode(const std::string& label) const;
    void validate() const;
    bool operator==(const ModeLayout&) const = default;
};

// Complex amplitude vector over the truncated occupation basis. Value
// semantics: every operation returns a new state; instances are safe to share
// read-only across threads. The truncation bucket accumulates probability
// mass dropped at the cutoff by create()/apply_element() since the last
// normalized() call.
class FockVector {
public:
    explicit FockVector(ModeLayout layout);

    const ModeLayout& layout() const { return layout_; }
    std::size_t dim() const { return amps_.size(); }
    int cutoff() const { return layout_.cutoff; }
    std::size_t num_modes() const { return layout_.modes.size(); }

    const std::vector<Complex>& amplitudes() const { return amps_; }
    std::vector<Complex>& amplitudes() { return amps_; }

    Complex amp(std::size_t index) const { return amps_.at(index); }
    Complex amp(const std::vector<int>& occ) const;
    void set_amp(const std::vector<int>& occ, Complex value);

    std::vector<int> occupation_of(std::size_t index) const;
    std::size_t index_of(const std::vector<int>& occ) const;

    double norm2() const;
    double norm() const;
    // Unit-norm copy with a cleared truncation bucket. Throws on (near-)zero states.
    FockVector normalized() const;

    double truncation_loss() const { return trunc_loss_; }
    void add_truncation_loss(double loss) { trunc_loss_ += loss; }

    static FockVector from_terms(
        const ModeLayout& layout,
        const std::vector<std::pair<std::vector<int>, Complex>>& terms);

private:
    ModeLayout layout_;
    std::vector<Complex> amps_;
    double trunc_loss_ = 0.0;
};

FockVector vacuum(const ModeLayout& layout);

// Bosonic raising a†|n> = sqrt(n+1)|n+1> on one mode. Components that would
// exceed the cutoff are dropped; the dropped probability weight of the input
// is added to the result's truncation bucket.
FockVector create(const FockVector& state, const std::string& mode);

// Lowering a|n> = sqrt(n)|n-1>; a|0> = 0 (no truncation involved).
FockVector annihilate(const FockVector& state, const std::string& mode);

// Tensor product; layouts must be disjoint and share the same cutoff. The
// merged layout keeps s1's modes first, then s2's.
FockVector tensor(const FockVector& s1, const FockVector& s2);

// Permutes modes into the given order (a permutation of the current labels).
FockVector reorder_modes(const FockVector& state, const std::vector<std::string>& order);

// Renames modes without touching amplitudes (old label -> new label pairs).
FockVector rename_modes(const FockVector& state,
                        const std::vector<std::pair<std::string, std::string>>& renames);

// Tensors |0...0> factors for the extra labels onto the state.
FockVector extend_with_vacuum(const FockVector& state, const std::vector<std::string>& labels);

std::complex<double> inner_product(const FockVector& s1, const FockVector& s2);

// |<s1|s2>|^2 with both inputs normalized internally. Layouts must match.
double fidelity(const FockVector& s1, const FockVector& s2);

// Fixes the global phase: the largest-magnitude amplitude (lowest index on
// ties) is made real-positive.
FockVector canonical_phase(const FockVector& state);

// Text serialization: header line with mode labels and cutoff, then one line
// per nonzero amplitude "n1,n2,...,nm<TAB>re<TAB>im".
std::string serialize_state(const FockVector& state);
FockVector parse_state(std::istream& in);
FockVector parse_state(const std::string& text);

}  // namespace swnoon
