#include "hsprg/schedule.hpp"

#include "hsprg/common.hpp"

#include <cmath>
#include <limits>

namespace hsprg {

std::string to_string(ScheduleMode mode) { return mode == ScheduleMode::theorem ? "theorem" : "empirical"; }

std::string to_string(LogBase base) { return base == LogBase::natural ? "e" : "2"; }

ScheduleMode parse_schedule_mode(const std::string& text) {
    if (text == "theorem") return ScheduleMode::theorem;
    if (text == "empirical") return ScheduleMode::empirical;
    throw InvalidInput("unknown schedule mode '" + text + "'");
}

LogBase parse_log_base(const std::string& text) {
    if (text == "e" || text == "natural") return LogBase::natural;
    if (text == "2" || text == "two") return LogBase::two;
    throw InvalidInput("unknown log base '" + text + "'");
}

double ParamSchedule::log(double x) const { return log_base == LogBase::natural ? std::log(x) : std::log2(x); }

namespace {

std::int64_t ceil_to_int(double x, const char* what) {
    const double r = std::ceil(x);
    if (!std::isfinite(r) || r > static_cast<double>(std::numeric_limits<std::int64_t>::max() / 8)) {
        throw InvalidConfig(std::string("derived quantity ") + what + " overflows");
    }
    return static_cast<std::int64_t>(r);
}

} // namespace

ParamSchedule make_schedule(double eps, double C, double c, ScheduleMode mode, LogBase base) {
    if (!std::isfinite(eps) || !std::isfinite(C) || !std::isfinite(c)) {
        throw InvalidInput("schedule parameters must be finite");
    }
    if (!(eps > 0.0 && eps < 1.0)) {
        throw InvalidInput("eps must lie in (0, 1)");
    }
    if (!(C > 0.0) || !(c > 0.0)) {
        throw InvalidInput("constants C and c must be positive");
    }
    if (mode == ScheduleMode::theorem) {
        if (!(eps < 0.1)) {
            throw InvalidConfig("theorem mode requires eps < 0.1");
        }
        if (c != std::floor(c) || std::fmod(c, 2.0) != 0.0) {
            throw InvalidConfig("theorem mode requires c to be an even integer");
        }
        if (!(10.0 * c - C / 128.0 <= -1.0)) {
            throw InvalidConfig("theorem mode requires 10c - C/128 <= -1");
        }
    }

    ParamSchedule s;
    s.eps = eps;
    s.C = C;
    s.c = c;
    s.mode = mode;
    s.log_base = base;

    const double log_inv = s.log(1.0 / eps);
    s.a = eps * eps / (C * log_inv);
    s.m = ceil_to_int(c * log_inv / s.a, "m");
    if (s.m % 2 != 0) {
        ++s.m;
    }
    s.K = 4 * s.m + 2;
    s.Z = eps / (2.0 * s.a);
    const double log10 = s.log(10.0 / eps);
    s.L = ceil_to_int(8.0 * log10 * log10 / (eps * eps), "L");
    s.t_sep = static_cast<int>(ceil_to_int(log10, "t_sep"));
    return s;
}

ParamSchedule schedule_for_gap(double a, double eps, double c, LogBase base) {
    if (!(a > 0.0 && a < 1.0)) {
        throw InvalidInput("a must lie in (0, 1)");
    }
    if (!(eps > 0.0 && eps < 1.0)) {
        throw InvalidInput("eps must lie in (0, 1)");
    }
    const double log_inv = base == LogBase::natural ? std::log(1.0 / eps) : std::log2(1.0 / eps);
    auto s = make_schedule(eps, eps * eps / (a * log_inv), c, ScheduleMode::empirical, base);
    // Remove the round-trip rounding through C from every a-derived field.
    s.a = a;
    s.m = ceil_to_int(c * log_inv / a, "m");
    if (s.m % 2 != 0) {
        ++s.m;
    }
    s.K = 4 * s.m + 2;
    s.Z = eps / (2.0 * a);
    return s;
}

} // namespace hsprg
