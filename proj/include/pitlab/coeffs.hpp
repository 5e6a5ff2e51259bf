#pragma once

// Coefficient sequences for entire functions f(z) = sum coefficient(n) z^n.
//
// A sequence is a phase rule times a modulus rule: 1/n!, the products
// c_n = b_0 ... b_{n-1} of the (1-w)^{-s} Taylor coefficients, or 1.
// Coefficients are produced lazily at any requested precision and memoized
// per precision; tables only ever grow.

#include "pitlab/mp.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace pitlab {

namespace detail {
struct SequenceState;
}

/// A real parameter alpha that can be materialized at any precision.
/// Symbolic tokens keep full accuracy; decimal literals are exact decimals.
class AlphaSpec {
public:
    enum class Kind { Decimal, Double, Sqrt2, Golden, PiFrac };

    /// Accepts "sqrt2", "golden" ((sqrt5-1)/2), "pi" (pi mod 1) or a decimal literal.
    static AlphaSpec parse(const std::string& token);
    /// The binary value of `value`, exactly.
    static AlphaSpec from_double(double value);

    Kind kind() const { return kind_; }
    Real value(Bits prec) const;
    double approx() const;
    const std::string& token() const { return token_; }

private:
    Kind kind_ = Kind::Double;
    std::string token_ = "0";
    double binary_ = 0.0;
};

struct QuadraticPhase {
    AlphaSpec alpha;
};
struct RationalPhase {
    std::int64_t p = 0;
    std::int64_t q = 1;
};
/// psi(n) = sum_k c_k exp(-lambda_k n)
struct PsiExpPhase {
    std::vector<double> c;
    std::vector<double> lambda;
};
/// Hardy's E_{s,a} with s = i*s_imag: coefficient (n+a)^s / n!, n >= 1.
struct HardyPhase {
    double s_imag = 0.0;
    double a = 1.0;
};
/// Phases in radians, repeated cyclically.
struct ExplicitPhase {
    std::vector<double> phases;
};

class CoefficientSequence;

/// Even part of f1 rotated by theta1 plus odd part of f2 rotated by theta2.
struct CombinedPhase {
    std::shared_ptr<const detail::SequenceState> f1;
    std::shared_ptr<const detail::SequenceState> f2;
    double theta1 = 0.0;
    double theta2 = 0.0;
};

struct PhaseRule {
    std::variant<QuadraticPhase, RationalPhase, PsiExpPhase, HardyPhase, ExplicitPhase, CombinedPhase> kind;
    std::optional<std::int64_t> period;
};

struct ModulusRule {
    enum class Kind { Factorial, Product, Unit };
    Kind kind = Kind::Factorial;
    double s_hadamard = 0.0;  // exponent of H(w) = (1-w)^{-s}, product moduli only

    /// Declared order of growth: 1 for factorial, 1/(1-s) for product moduli, 0 for unit.
    double rho() const;
};

/// Immutable view of a prefix of a coefficient table.
class CoefficientTable {
public:
    static constexpr std::size_t kChunk = 256;
    using Chunk = std::vector<HPComplex>;

    CoefficientTable() = default;
    CoefficientTable(std::vector<std::shared_ptr<const Chunk>> chunks, std::size_t size)
        : chunks_(std::move(chunks)), size_(size) {}

    std::size_t size() const { return size_; }
    const HPComplex& operator[](std::size_t n) const { return (*chunks_[n / kChunk])[n % kChunk]; }

private:
    std::vector<std::shared_ptr<const Chunk>> chunks_;
    std::size_t size_ = 0;
};

/// Handle to a lazily evaluated coefficient sequence. Copies share the memo cache.
/// All member functions are safe to call concurrently.
class CoefficientSequence {
public:
    enum class Kind { Primary, Derivative, Hadamard, Disc };

    explicit CoefficientSequence(std::shared_ptr<const detail::SequenceState> state, Kind kind = Kind::Primary,
                                 double derived_s = 0.0);

    Kind kind() const;
    const PhaseRule& phase() const;
    const ModulusRule& modulus() const;
    Bits precision_bits() const;
    std::optional<std::int64_t> period() const;
    double rho() const;
    /// True when every coefficient is (phase of modulus one) * modulus(n), i.e. class (1) up to moduli.
    bool unit_phase() const;
    /// True for factorial-modulus primary sequences.
    bool factorial_modulus() const;

    /// Coefficient of z^n at the sequence precision.
    HPComplex coefficient(std::size_t n) const;
    HPComplex coefficient(std::size_t n, Bits prec) const;
    /// Snapshot with at least `count` entries at precision >= prec.
    CoefficientTable table(std::size_t count, Bits prec) const;

    /// log of an upper bound on |coefficient(n)|; -inf when the coefficient is zero.
    double log_majorant(std::size_t n) const;
    /// Upper bound on majorant(k+1)/majorant(k) over all k >= n.
    double ratio_bound(std::size_t n) const;

    /// Largest precision bucket a request for `prec` bits is served from.
    static Bits bucket(Bits prec);

    /// Exponent of the Hadamard multiplier for Kind::Hadamard.
    double derived_s() const { return derived_s_; }
    /// The primary sequence this one is derived from (itself for primary sequences).
    CoefficientSequence primary() const { return CoefficientSequence(state_); }

    const std::shared_ptr<const detail::SequenceState>& state() const { return state_; }

private:
    std::shared_ptr<const detail::SequenceState> state_;
    Kind kind_ = Kind::Primary;
    double derived_s_ = 0.0;
};

constexpr Bits kDefaultPrecision = 256;

CoefficientSequence make_quadratic_phase(const AlphaSpec& alpha, Bits precision = kDefaultPrecision);
CoefficientSequence make_quadratic_phase(double alpha, Bits precision = kDefaultPrecision);
CoefficientSequence make_rational_phase(std::int64_t p, std::int64_t q, Bits precision = kDefaultPrecision);
CoefficientSequence make_psi_phase(std::vector<double> c, std::vector<double> lambda,
                                   Bits precision = kDefaultPrecision);
CoefficientSequence make_hardy(double s_real, double s_imag, double a, Bits precision = kDefaultPrecision);
CoefficientSequence make_explicit_phase(std::vector<double> phases, Bits precision = kDefaultPrecision);
CoefficientSequence make_product_moduli(double s_hadamard, const AlphaSpec& alpha, Bits precision = kDefaultPrecision);
CoefficientSequence make_product_moduli(double s_hadamard, double alpha, Bits precision = kDefaultPrecision);

/// The exponential e^z as a member of the family (all phases zero).
CoefficientSequence make_exponential(Bits precision = kDefaultPrecision);

/// (C o R_theta1)[f1] + (S o R_theta2)[f2], with C/S the even/odd projectors.
CoefficientSequence combine_Q(const CoefficientSequence& f1, const CoefficientSequence& f2, double theta1,
                              double theta2);

/// Derived series: f' (coefficients (n+1) a_{n+1}).
CoefficientSequence derivative(const CoefficientSequence& f);
/// Derived series: Hadamard product with H(w) = (1-w)^{-s}, coefficients a_n b_n.
CoefficientSequence hadamard_product(const CoefficientSequence& f, double s);
/// Derived series: G(w) = sum_{n>=1} u_{n-1} w^n with u_n the unit-scaled coefficients
/// (factorial moduli removed).
CoefficientSequence disc_series(const CoefficientSequence& f);

/// Taylor coefficients of (1-w)^{-s}: b_0 = 1, b_n = b_{n-1} (n-1+s)/n, at precision prec.
std::vector<Real> hadamard_multipliers(double s, std::size_t count, Bits prec);

struct BoundedValue {
    double value = 0.0;
    double error_bound = 0.0;
};

/// Quadratic mean of f on |z| = r via Parseval: sqrt(sum |a_n|^2 r^{2n}).
BoundedValue parseval_m2(const CoefficientSequence& seq, double r, double rel_tol = 1e-15);

/// Minimal period of n -> n^2 p mod q.
std::int64_t quadratic_residue_period(std::int64_t p, std::int64_t q);

nlohmann::json to_json(const CoefficientSequence& seq);
CoefficientSequence sequence_from_json(const nlohmann::json& j);

}  // namespace pitlab
