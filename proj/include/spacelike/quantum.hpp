#pragma once

// Two spin-1/2 particles on branches B and A. Single-particle spinors use the
// sigma_z basis (index 0 = |+>, 1 = |->); two-particle amplitudes are indexed
// [b][a]. The public amplitude order is
//   |->_B|+>_A, |+>_B|->_A, |+>_B|+>_A, |->_B|->_A.

#include "spacelike/kinematics.hpp"
#include "spacelike/minkowski.hpp"
#include "spacelike/rng.hpp"
#include "spacelike/vec3.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace spacelike::quantum {

using Complex = std::complex<double>;

inline constexpr double kNormTol = 1e-9;

struct Spinor {
    std::array<Complex, 2> c{Complex{1.0}, Complex{0.0}};

    double norm() const;
    // Normalized, with the first nonzero component real and positive.
    Spinor canonical() const;
    static Spinor up() { return {{Complex{1.0}, Complex{0.0}}}; }
    static Spinor down() { return {{Complex{0.0}, Complex{1.0}}}; }
};

// |<u|v>|^2 for normalized spinors.
double fidelity(const Spinor& u, const Spinor& v);

// Eigenvector of axis . sigma with eigenvalue sign (+1 / -1), phase canonical.
Spinor eigenvector(const Vec3& axis, int sign);

class StateVector {
public:
    StateVector() = default;

    static StateVector from_amplitudes(const std::array<Complex, 4>& declared_order);
    static StateVector product(const Spinor& b, const Spinor& a);

    std::array<Complex, 4> amplitudes() const;
    Complex at(int b, int a) const { return m_[b][a]; }
    Complex& at(int b, int a) { return m_[b][a]; }

    double norm() const;
    bool is_normalized(double tol = kNormTol) const;
    // Normalized copy with the first nonzero amplitude (public order) real-positive.
    StateVector canonical() const;
    // Schmidt rank one within tol.
    bool is_product(double tol = kNormTol) const;
    // Factor of the given side for a product state (phase canonical).
    Spinor factor(Side side) const;

private:
    std::array<std::array<Complex, 2>, 2> m_{};
};

// Equality up to a global phase.
bool same_ray(const StateVector& u, const StateVector& v, double tol = 1e-9);

StateVector singlet();

struct Outcome {
    Side detector = Side::A;
    std::size_t axis_index = 0;
    int sign = +1;
    Vec3 axis{0.0, 0.0, 1.0};
};

struct ProbabilityTable {
    struct Entry {
        std::size_t axis_index;
        int sign;
        double p;
    };

    Side detector = Side::A;
    std::vector<Vec3> axes;
    std::vector<Entry> entries;  // axis-major, + before -

    double total() const;
    double p(std::size_t axis_index, int sign) const;
    Outcome outcome(std::size_t entry) const;
    // Entry sampled by inverse CDF from a uniform u in [0, 1).
    Outcome sample(double u) const;
};

// Projector (1 + sign axis.sigma)/2 applied to one factor, not renormalized.
StateVector apply_projector(const StateVector& psi, Side side, const Vec3& axis, int sign);

// Alternatives weighted by axis choice: w_i * <psi|P_i^{+-}|psi>. Throws
// StateError for non-normalized input.
ProbabilityTable born_probabilities(const StateVector& psi, Side side, std::span<const Vec3> axes,
                                    std::span<const double> weights);
ProbabilityTable born_probabilities(const StateVector& psi, const kinematics::Detector& d);

// Projects and renormalizes (phase canonical). Throws ImpossibleOutcome for
// outcomes with vanishing probability.
StateVector collapse_state(const StateVector& psi, const Outcome& o);

// Born table of the remaining detector against an already collapsed state.
ProbabilityTable conditional_probabilities(const StateVector& psi_after, const kinematics::Detector& d);

// Contracts the `side` factor of psi with `factor` and returns the normalized
// remaining factor. Throws ImpossibleOutcome when the contraction vanishes.
Spinor contract(const StateVector& psi, Side side, const Spinor& factor);

// Branch factor left after contracting with the eigenvector of outcome k
// (k.detector names the contracted side).
Spinor intermediate_state(const StateVector& psi_s, const Outcome& k);

// Piecewise wave function along the two branches. The first decider's
// surface crosses the other branch at `crossing`; the four lab epochs are
//   Psi_S | pending x second_reduced | first_reduced x second_reduced | first_reduced x second_final
// where "pending" is the first side's factor before its own decision.
class WaveFunctionTimeline {
public:
    struct Epoch {
        double t_begin;  // -inf for the first epoch
        double t_end;    // +inf for the last epoch
        std::string begin_label;
        StateVector state;
        bool entangled;
    };

    Side first = Side::B;
    minkowski::Event crossing;
    minkowski::Event first_decision;
    minkowski::Event second_decision;
    Outcome k;  // first decider's result
    Outcome l;  // second decider's result

    StateVector initial;
    Spinor first_pending;
    Spinor first_reduced;
    Spinor second_reduced;
    Spinor second_final;

    // Product of the factors on the slice t = const of the frame with
    // rapidity frame_zeta.
    StateVector state_at(double t, double frame_zeta = 0.0) const;
    bool entangled_at(double t, double frame_zeta = 0.0) const;
    // The four epochs in crossing order with boundaries expressed in the given
    // frame. Contents never depend on the frame; boundaries may come out of
    // coordinate order (t_begin > t_end) where the frame reorders B2 and A1.
    std::vector<Epoch> epochs(double frame_zeta = 0.0) const;

    std::string crossing_label() const;
    std::string first_label() const;
    std::string second_label() const;
};

// Throws TimelineError when the crossing does not precede both decisions and
// ImpossibleOutcome when l is incompatible with the reduced second factor.
WaveFunctionTimeline build_timeline(const StateVector& psi_s, Side first, const minkowski::Event& crossing,
                                    const minkowski::Event& first_decision,
                                    const minkowski::Event& second_decision, const Outcome& k,
                                    const Outcome& l);

struct LhvViolation {
    enum class Kind { exclusive_signs, certainty_link };
    Kind kind;
    Side side;  // for certainty_link: the side whose entry is zero
    std::size_t axis_index;
    int sign;
    std::string describe() const;
};

// Constraints a local deterministic assignment must satisfy:
//   p^i p^-i = 0 on each side, and p_A^i = 0 <=> p_B^-i = 0.
std::vector<LhvViolation> lhv_constraints_check(const ProbabilityTable& table_a, const ProbabilityTable& table_b);

struct ChshResult {
    double estimate = 0.0;
    double analytic = 0.0;
    std::array<std::array<double, 2>, 2> correlator{};           // [a][b] Monte Carlo
    std::array<std::array<double, 2>, 2> correlator_analytic{};  // -a.b
    std::array<std::array<std::uint64_t, 2>, 2> samples{};
};

// S = E(a,b) - E(a,b') + E(a',b) + E(a',b') for the singlet with a = axes_a[0],
// a' = axes_a[1], b = axes_b[0], b' = axes_b[1]. Each trial picks a setting
// pair uniformly, measures B from the Born table, collapses, then samples A.
ChshResult chsh_value(const std::array<Vec3, 2>& axes_a, const std::array<Vec3, 2>& axes_b, std::uint64_t trials,
                      std::uint64_t seed);

// a = z, a' = x, b = -(x + z)/sqrt2, b' = (z - x)/sqrt2: S = 2 sqrt2.
std::array<Vec3, 4> optimal_chsh_axes();

}  // namespace spacelike::quantum
