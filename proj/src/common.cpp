#include "ramified/common.hpp"

#include <cmath>

namespace ramified {

const char* errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::NegativeMass: return "NegativeMass";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::TotalMassNotOne: return "TotalMassNotOne";
        case Errc::AlphaOutOfRange: return "AlphaOutOfRange";
        case Errc::UnmatchedAtom: return "UnmatchedAtom";
        case Errc::KirchhoffViolation: return "KirchhoffViolation";
        case Errc::NotATree: return "NotATree";
        case Errc::UnbalancedMass: return "UnbalancedMass";
        case Errc::ResourceLimit: return "ResourceLimit";
        case Errc::Infeasible: return "Infeasible";
        case Errc::InvalidNetwork: return "InvalidNetwork";
        case Errc::InvalidPlan: return "InvalidPlan";
        case Errc::InvalidFlow: return "InvalidFlow";
        case Errc::ParseError: return "ParseError";
    }
    return "UnknownError";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

void fail(Errc code, const std::string& message) { throw Error(code, message); }

double pairwise_sum(std::span<const double> values) {
    if (values.empty()) return 0.0;
    if (values.size() == 1) return values[0];
    if (values.size() == 2) return values[0] + values[1];
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double alpha_pow(double w, double alpha) {
    if (w == 0.0) return 0.0;
    return std::pow(w, alpha);
}

double squared_distance(const Point& a, const Point& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

double distance(const Point& a, const Point& b) { return std::sqrt(squared_distance(a, b)); }

bool finite_point(const Point& p) {
    for (double x : p)
        if (!std::isfinite(x)) return false;
    return true;
}

void require_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        fail(Errc::AlphaOutOfRange, "alpha must lie in [0,1], got " + std::to_string(alpha));
}

}  // namespace ramified
