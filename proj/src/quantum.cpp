#include "spacelike/quantum.hpp"

#include "spacelike/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spacelike::quantum {

namespace {

constexpr double kZeroProb = 1e-12;

// Public amplitude order -> (b, a) index pairs; 0 = |+>, 1 = |->.
constexpr std::array<std::array<int, 2>, 4> kOrder{{{1, 0}, {0, 1}, {0, 0}, {1, 1}}};

using Matrix2 = std::array<std::array<Complex, 2>, 2>;

Matrix2 projector(const Vec3& n, int sign) {
    const double s = sign > 0 ? 1.0 : -1.0;
    return {{{Complex{0.5 * (1.0 + s * n.z)}, 0.5 * s * Complex{n.x, -n.y}},
             {0.5 * s * Complex{n.x, n.y}, Complex{0.5 * (1.0 - s * n.z)}}}};
}

Complex phase_of_first_nonzero(const Complex* begin, const Complex* end) {
    for (auto* p = begin; p != end; ++p) {
        if (std::abs(*p) > 1e-12) return *p / std::abs(*p);
    }
    return Complex{1.0};
}

void require_normalized(const StateVector& psi, const char* what) {
    if (!psi.is_normalized()) throw StateError(std::string(what) + ": state vector is not normalized");
}

std::string sign_label(std::size_t axis, int sign) {
    return (sign > 0 ? "+" : "-") + std::to_string(axis + 1);
}

}  // namespace

// ─── Spinor ─────────────────────────────────────────────────────────────────

double Spinor::norm() const { return std::sqrt(std::norm(c[0]) + std::norm(c[1])); }

Spinor Spinor::canonical() const {
    const double n = norm();
    if (n <= 0.0) throw StateError("cannot normalize a zero spinor");
    const Complex ph = phase_of_first_nonzero(c.data(), c.data() + 2);
    return {{c[0] / (ph * n), c[1] / (ph * n)}};
}

double fidelity(const Spinor& u, const Spinor& v) {
    return std::norm(std::conj(u.c[0]) * v.c[0] + std::conj(u.c[1]) * v.c[1]);
}

Spinor eigenvector(const Vec3& axis, int sign) {
    const auto p = projector(axis, sign);
    // The column with the larger norm spans the range of the rank-1 projector.
    const double n0 = std::norm(p[0][0]) + std::norm(p[1][0]);
    const double n1 = std::norm(p[0][1]) + std::norm(p[1][1]);
    const int col = n0 >= n1 ? 0 : 1;
    return Spinor{{p[0][col], p[1][col]}}.canonical();
}

// ─── StateVector ────────────────────────────────────────────────────────────

StateVector StateVector::from_amplitudes(const std::array<Complex, 4>& declared_order) {
    StateVector s;
    for (std::size_t i = 0; i < 4; ++i) s.m_[kOrder[i][0]][kOrder[i][1]] = declared_order[i];
    return s;
}

StateVector StateVector::product(const Spinor& b, const Spinor& a) {
    StateVector s;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) s.m_[i][j] = b.c[i] * a.c[j];
    }
    return s;
}

std::array<Complex, 4> StateVector::amplitudes() const {
    std::array<Complex, 4> out;
    for (std::size_t i = 0; i < 4; ++i) out[i] = m_[kOrder[i][0]][kOrder[i][1]];
    return out;
}

double StateVector::norm() const {
    double s = 0.0;
    for (const auto& row : m_) {
        for (const auto& v : row) s += std::norm(v);
    }
    return std::sqrt(s);
}

bool StateVector::is_normalized(double tol) const { return std::abs(norm() - 1.0) <= tol; }

StateVector StateVector::canonical() const {
    const double n = norm();
    if (n <= 0.0) throw StateError("cannot normalize a zero state");
    const auto amps = amplitudes();
    const Complex ph = phase_of_first_nonzero(amps.data(), amps.data() + 4);
    StateVector out;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) out.m_[i][j] = m_[i][j] / (ph * n);
    }
    return out;
}

bool StateVector::is_product(double tol) const {
    const double n2 = norm() * norm();
    return std::abs(m_[0][0] * m_[1][1] - m_[0][1] * m_[1][0]) <= tol * std::max(n2, 1e-300);
}

Spinor StateVector::factor(Side side) const {
    if (side == Side::A) {
        const double r0 = std::norm(m_[0][0]) + std::norm(m_[0][1]);
        const double r1 = std::norm(m_[1][0]) + std::norm(m_[1][1]);
        const int row = r0 >= r1 ? 0 : 1;
        return Spinor{{m_[row][0], m_[row][1]}}.canonical();
    }
    const double c0 = std::norm(m_[0][0]) + std::norm(m_[1][0]);
    const double c1 = std::norm(m_[0][1]) + std::norm(m_[1][1]);
    const int col = c0 >= c1 ? 0 : 1;
    return Spinor{{m_[0][col], m_[1][col]}}.canonical();
}

bool same_ray(const StateVector& u, const StateVector& v, double tol) {
    const auto a = u.canonical().amplitudes();
    const auto b = v.canonical().amplitudes();
    Complex overlap{0.0};
    for (std::size_t i = 0; i < 4; ++i) overlap += std::conj(a[i]) * b[i];
    return std::abs(std::abs(overlap) - 1.0) <= tol;
}

StateVector singlet() {
    const double h = 1.0 / std::sqrt(2.0);
    return StateVector::from_amplitudes({Complex{h}, Complex{-h}, Complex{0.0}, Complex{0.0}});
}

// ─── ProbabilityTable ───────────────────────────────────────────────────────

double ProbabilityTable::total() const {
    double s = 0.0;
    for (const auto& e : entries) s += e.p;
    return s;
}

double ProbabilityTable::p(std::size_t axis_index, int sign) const {
    for (const auto& e : entries) {
        if (e.axis_index == axis_index && e.sign == sign) return e.p;
    }
    throw DomainError("probability table has no entry for axis " + std::to_string(axis_index));
}

Outcome ProbabilityTable::outcome(std::size_t entry) const {
    const auto& e = entries.at(entry);
    return {detector, e.axis_index, e.sign, axes.at(e.axis_index)};
}

Outcome ProbabilityTable::sample(double u) const {
    double acc = 0.0;
    std::size_t last_positive = entries.size();
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].p <= 0.0) continue;
        last_positive = i;
        acc += entries[i].p;
        if (u < acc) return outcome(i);
    }
    if (last_positive == entries.size()) throw StateError("cannot sample from an empty table");
    return outcome(last_positive);
}

// ─── Measurement ────────────────────────────────────────────────────────────

StateVector apply_projector(const StateVector& psi, Side side, const Vec3& axis, int sign) {
    const auto p = projector(axis, sign);
    StateVector out;
    for (int b = 0; b < 2; ++b) {
        for (int a = 0; a < 2; ++a) {
            Complex v{0.0};
            for (int k = 0; k < 2; ++k) {
                v += side == Side::A ? p[a][k] * psi.at(b, k) : p[b][k] * psi.at(k, a);
            }
            out.at(b, a) = v;
        }
    }
    return out;
}

ProbabilityTable born_probabilities(const StateVector& psi, Side side, std::span<const Vec3> axes,
                                    std::span<const double> weights) {
    require_normalized(psi, "born_probabilities");
    if (axes.empty() || axes.size() != weights.size()) {
        throw DomainError("born_probabilities: axes and weights must be non-empty and of equal length");
    }
    ProbabilityTable t;
    t.detector = side;
    t.axes.assign(axes.begin(), axes.end());
    for (std::size_t i = 0; i < axes.size(); ++i) {
        for (int sign : {+1, -1}) {
            const double n = apply_projector(psi, side, axes[i], sign).norm();
            t.entries.push_back({i, sign, std::clamp(weights[i] * n * n, 0.0, 1.0)});
        }
    }
    return t;
}

ProbabilityTable born_probabilities(const StateVector& psi, const kinematics::Detector& d) {
    return born_probabilities(psi, d.side, d.axes, d.axis_weights);
}

StateVector collapse_state(const StateVector& psi, const Outcome& o) {
    const StateVector projected = apply_projector(psi, o.detector, o.axis, o.sign);
    const double n = projected.norm();
    if (n * n <= kZeroProb) {
        throw ImpossibleOutcome("outcome " + sign_label(o.axis_index, o.sign) + " at " +
                                std::string(to_string(o.detector)) + " has zero probability");
    }
    return projected.canonical();
}

ProbabilityTable conditional_probabilities(const StateVector& psi_after, const kinematics::Detector& d) {
    return born_probabilities(psi_after, d);
}

Spinor contract(const StateVector& psi, Side side, const Spinor& factor) {
    Spinor rest{{Complex{0.0}, Complex{0.0}}};
    for (int r = 0; r < 2; ++r) {
        for (int k = 0; k < 2; ++k) {
            rest.c[r] += std::conj(factor.c[k]) * (side == Side::A ? psi.at(r, k) : psi.at(k, r));
        }
    }
    if (std::norm(rest.c[0]) + std::norm(rest.c[1]) <= kZeroProb) {
        throw ImpossibleOutcome("contraction with the branch factor vanishes");
    }
    return rest.canonical();
}

Spinor intermediate_state(const StateVector& psi_s, const Outcome& k) {
    return contract(psi_s, k.detector, eigenvector(k.axis, k.sign));
}

// ─── Timeline ───────────────────────────────────────────────────────────────

namespace {

double frame_time(const minkowski::Event& e, double zeta) { return minkowski::boost(e, {zeta}).t; }

}  // namespace

std::string WaveFunctionTimeline::crossing_label() const { return "S" + std::string(to_string(first)); }

std::string WaveFunctionTimeline::first_label() const { return first == Side::B ? "B2" : "A1"; }

std::string WaveFunctionTimeline::second_label() const { return first == Side::B ? "A1" : "B2"; }

bool WaveFunctionTimeline::entangled_at(double t, double frame_zeta) const {
    return t < frame_time(crossing, frame_zeta);
}

StateVector WaveFunctionTimeline::state_at(double t, double frame_zeta) const {
    if (entangled_at(t, frame_zeta)) return initial;
    const Spinor& f = t < frame_time(first_decision, frame_zeta) ? first_pending : first_reduced;
    const Spinor& s = t < frame_time(second_decision, frame_zeta) ? second_reduced : second_final;
    return first == Side::B ? StateVector::product(f, s) : StateVector::product(s, f);
}

std::vector<WaveFunctionTimeline::Epoch> WaveFunctionTimeline::epochs(double frame_zeta) const {
    auto pair = [&](const Spinor& f, const Spinor& s) {
        return first == Side::B ? StateVector::product(f, s) : StateVector::product(s, f);
    };
    const double t_cross = frame_time(crossing, frame_zeta);
    const double t_first = frame_time(first_decision, frame_zeta);
    const double t_second = frame_time(second_decision, frame_zeta);
    constexpr double inf = std::numeric_limits<double>::infinity();
    return {{-inf, t_cross, "", initial, true},
            {t_cross, t_first, crossing_label(), pair(first_pending, second_reduced), false},
            {t_first, t_second, first_label(), pair(first_reduced, second_reduced), false},
            {t_second, inf, second_label(), pair(first_reduced, second_final), false}};
}

WaveFunctionTimeline build_timeline(const StateVector& psi_s, Side first, const minkowski::Event& crossing,
                                    const minkowski::Event& first_decision,
                                    const minkowski::Event& second_decision, const Outcome& k,
                                    const Outcome& l) {
    require_normalized(psi_s, "build_timeline");
    if (k.detector != first || l.detector != other(first)) {
        throw TimelineError("outcome sides do not match the decision order");
    }
    if (!(crossing.t < first_decision.t) || !(crossing.t < second_decision.t)) {
        throw TimelineError("reduction crossing must precede both decisions");
    }
    WaveFunctionTimeline tl;
    tl.first = first;
    tl.crossing = crossing;
    tl.first_decision = first_decision;
    tl.second_decision = second_decision;
    tl.k = k;
    tl.l = l;
    tl.initial = psi_s;

    const StateVector reduced = collapse_state(psi_s, k);
    tl.first_reduced = reduced.factor(first);
    tl.second_reduced = reduced.factor(other(first));
    tl.first_pending = contract(psi_s, other(first), tl.second_reduced);

    const Spinor final_second = eigenvector(l.axis, l.sign);
    if (fidelity(final_second, tl.second_reduced) <= kZeroProb) {
        throw ImpossibleOutcome("second outcome has zero probability after the first reduction");
    }
    tl.second_final = final_second;
    return tl;
}

// ─── Local-realism constraints ──────────────────────────────────────────────

std::string LhvViolation::describe() const {
    const std::string s(to_string(side));
    if (kind == Kind::exclusive_signs) {
        return "p_" + s + "^" + sign_label(axis_index, +1) + " * p_" + s + "^" + sign_label(axis_index, -1) +
               " != 0";
    }
    const std::string o(to_string(other(side)));
    return "p_" + s + "^" + sign_label(axis_index, sign) + " = 0 but p_" + o + "^" +
           sign_label(axis_index, -sign) + " != 0";
}

std::vector<LhvViolation> lhv_constraints_check(const ProbabilityTable& table_a, const ProbabilityTable& table_b) {
    if (table_a.axes.size() != table_b.axes.size()) {
        throw DomainError("lhv_constraints_check: tables cover different axis sets");
    }
    std::vector<LhvViolation> out;
    const std::size_t n = table_a.axes.size();
    for (const auto* t : {&table_a, &table_b}) {
        for (std::size_t i = 0; i < n; ++i) {
            if (t->p(i, +1) * t->p(i, -1) > kZeroProb) {
                out.push_back({LhvViolation::Kind::exclusive_signs, t->detector, i, +1});
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (int sign : {+1, -1}) {
            const bool a_zero = table_a.p(i, sign) <= kZeroProb;
            const bool b_zero = table_b.p(i, -sign) <= kZeroProb;
            if (a_zero && !b_zero) out.push_back({LhvViolation::Kind::certainty_link, Side::A, i, sign});
            if (b_zero && !a_zero) out.push_back({LhvViolation::Kind::certainty_link, Side::B, i, -sign});
        }
    }
    return out;
}

// ─── CHSH ───────────────────────────────────────────────────────────────────

std::array<Vec3, 4> optimal_chsh_axes() {
    const double h = 1.0 / std::sqrt(2.0);
    return {Vec3{0.0, 0.0, 1.0}, Vec3{1.0, 0.0, 0.0}, Vec3{-h, 0.0, -h}, Vec3{-h, 0.0, h}};
}

ChshResult chsh_value(const std::array<Vec3, 2>& axes_a, const std::array<Vec3, 2>& axes_b, std::uint64_t trials,
                      std::uint64_t seed) {
    if (trials == 0) throw DomainError("chsh_value: trials must be >= 1");
    const StateVector psi = singlet();
    const std::array<double, 1> one{1.0};

    std::array<std::array<double, 2>, 2> sum{};
    ChshResult r;
    for (std::uint64_t t = 0; t < trials; ++t) {
        CounterRng rng(trial_seed(seed, t));
        const std::size_t ia = rng.uniform() < 0.5 ? 0 : 1;
        const std::size_t ib = rng.uniform() < 0.5 ? 0 : 1;
        const auto tb = born_probabilities(psi, Side::B, std::span(&axes_b[ib], 1), one);
        const Outcome ob = tb.sample(rng.uniform());
        const StateVector after = collapse_state(psi, ob);
        const auto ta = born_probabilities(after, Side::A, std::span(&axes_a[ia], 1), one);
        const Outcome oa = ta.sample(rng.uniform());
        sum[ia][ib] += static_cast<double>(oa.sign * ob.sign);
        ++r.samples[ia][ib];
    }
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            r.correlator[i][j] = r.samples[i][j] > 0 ? sum[i][j] / static_cast<double>(r.samples[i][j]) : 0.0;
            r.correlator_analytic[i][j] = -axes_a[i].dot(axes_b[j]);
        }
    }
    const auto s = [](const auto& e) { return e[0][0] - e[0][1] + e[1][0] + e[1][1]; };
    r.estimate = s(r.correlator);
    r.analytic = s(r.correlator_analytic);
    return r;
}

}  // namespace spacelike::quantum
