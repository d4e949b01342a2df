#pragma once

#include <cstdint>
#include <string>

namespace hsprg {

enum class ScheduleMode { theorem, empirical };
enum class LogBase { natural, two };

std::string to_string(ScheduleMode mode);
std::string to_string(LogBase base);
ScheduleMode parse_schedule_mode(const std::string& text);
LogBase parse_log_base(const std::string& text);

/// Derived quantities of the construction for an accuracy target eps and the
/// two absolute constants C (large) and c (small).
///
///   a     = eps^2 / (C log(1/eps))            sign-approximation gap
///   m     = ceil(c log(1/eps) / a), rounded up to even
///   K     = 4m + 2                            degree of the univariate P
///   Z     = eps / (2a)                        scaling of w.x - theta
///   L     = ceil(8 log^2(10/eps) / eps^2)     head size for large critical index
///   t_sep = ceil(log(10/eps))                 number of separated head coordinates
///
/// The derivations assume eps is a power of two; nothing here rounds eps, and
/// the only integer quantities (m, K, L, t_sep) are rounded up explicitly.
struct ParamSchedule {
    double eps = 0;
    double C = 0;
    double c = 0;
    double a = 0;
    std::int64_t m = 0;
    std::int64_t K = 0;
    double Z = 0;
    std::int64_t L = 0;
    int t_sep = 0;
    ScheduleMode mode = ScheduleMode::empirical;
    LogBase log_base = LogBase::natural;

    double log(double x) const;
};

/// Theorem mode requires 0 < eps < 0.1, c even and 10c - C/128 <= -1.
/// Empirical mode accepts any 0 < eps < 1 and positive constants.
/// Throws InvalidInput for out-of-range values and InvalidConfig naming the
/// violated inequality in theorem mode.
ParamSchedule make_schedule(double eps, double C, double c, ScheduleMode mode,
                            LogBase base = LogBase::natural);

/// Empirical schedule whose a equals the requested value: C is solved from
/// a = eps^2 / (C log(1/eps)).
ParamSchedule schedule_for_gap(double a, double eps, double c, LogBase base = LogBase::natural);

} // namespace hsprg
