#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace cookieaudit::stats {

/// I_x(a, b), a, b > 0, x in [0, 1]. Continued fraction (modified Lentz)
/// on whichever side of the mean converges fast.
double regularized_beta(double x, double a, double b);
/// P(a, x) and Q(a, x) = 1 - P(a, x); series below x = a + 1, continued
/// fraction above.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

double f_cdf(double x, double d1, double d2);
double f_sf(double x, double d1, double d2);
double chi2_cdf(double x, double k);
double chi2_sf(double x, double k);

struct TestResult {
    double statistic{0};
    double p_value{1};
    double df1{0};
    double df2{0};  // zero for chi-square tests
    std::size_t n_groups{0};
    std::size_t n_total{0};
};

using Groups = std::vector<std::vector<double>>;

enum class LeveneCenter { Mean, Median };
std::string_view to_string(LeveneCenter c) noexcept;

/// W on absolute deviations from each group's center, p from F(k-1, N-k).
/// Zero within-group spread of the deviations gives W = 0, p = 1 when the
/// groups agree and W = inf, p = 0 otherwise. Throws insufficient_data for
/// fewer than 2 groups or a group with fewer than 2 observations.
TestResult levene(const Groups& groups, LeveneCenter center = LeveneCenter::Mean);

/// H on mid-ranks, divided by the tie correction when `tie_correction`;
/// p from chi-square(k-1). All observations equal gives H = 0, p = 1.
/// Throws insufficient_data for fewer than 2 groups, an empty group, or
/// fewer than 3 observations.
TestResult kruskal_wallis(const Groups& groups, bool tie_correction = true);

/// Average ranks (1-based) of `values`, ties sharing their mean rank.
std::vector<double> midranks(const std::vector<double>& values);

}  // namespace cookieaudit::stats
