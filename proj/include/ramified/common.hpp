#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ramified {

/// Coordinate vector in R^d.
using Point = std::vector<double>;

enum class Errc {
    NegativeMass,
    DimensionMismatch,
    TotalMassNotOne,
    AlphaOutOfRange,
    UnmatchedAtom,
    KirchhoffViolation,
    NotATree,
    UnbalancedMass,
    ResourceLimit,
    Infeasible,
    InvalidNetwork,
    InvalidPlan,
    InvalidFlow,
    ParseError,
};

const char* errc_name(Errc code) noexcept;

/// Domain error with a stable name; the CLI prints the name on stderr and exits 1.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message);
    Errc code() const noexcept { return code_; }
    const char* name() const noexcept { return errc_name(code_); }

private:
    Errc code_;
};

[[noreturn]] void fail(Errc code, const std::string& message);

inline constexpr double kDivergenceTol = 1e-12;
inline constexpr double kMassTol = 1e-12;
inline constexpr double kWeightFloor = 1e-12;

/// Recursive pairwise summation; exact when the addends are 2^k equal values.
double pairwise_sum(std::span<const double> values);

/// w^alpha with the convention 0^alpha = 0 for alpha in [0,1] (a zero-weight
/// edge is absent from the support, including alpha = 0).
double alpha_pow(double w, double alpha);

double squared_distance(const Point& a, const Point& b);
double distance(const Point& a, const Point& b);

bool finite_point(const Point& p);

/// Throws AlphaOutOfRange unless alpha is finite and in [0,1].
void require_alpha(double alpha);

}  // namespace ramified
