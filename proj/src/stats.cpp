#include "cookieaudit/stats.hpp"

#include "cookieaudit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cookieaudit::stats {

namespace {

constexpr double kEps = 1e-15;
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 10000;

double beta_cf(double x, double a, double b) {
    const double qab = a + b, qap = a + 1, qam = a - 1;
    double c = 1, d = 1 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1) < kEps) break;
    }
    return h;
}

double gamma_series(double a, double x) {
    double ap = a, sum = 1 / a, del = sum;
    for (int n = 0; n < kMaxIter; ++n) {
        ap += 1;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_cf(double a, double x) {
    double b = x + 1 - a, c = 1 / kTiny, d = 1 / b, h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

}  // namespace

double regularized_beta(double x, double a, double b) {
    if (!(a > 0) || !(b > 0) || std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
    if (x <= 0) return 0;
    if (x >= 1) return 1;
    const double lbt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double bt = std::exp(lbt);
    if (x < (a + 1) / (a + b + 2)) return clamp01(bt * beta_cf(x, a, b) / a);
    return clamp01(1 - bt * beta_cf(1 - x, b, a) / b);
}

double regularized_gamma_p(double a, double x) {
    if (!(a > 0) || std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
    if (x <= 0) return 0;
    if (std::isinf(x)) return 1;
    if (x < a + 1) return clamp01(gamma_series(a, x));
    return clamp01(1 - gamma_cf(a, x));
}

double regularized_gamma_q(double a, double x) {
    if (!(a > 0) || std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
    if (x <= 0) return 1;
    if (std::isinf(x)) return 0;
    if (x < a + 1) return clamp01(1 - gamma_series(a, x));
    return clamp01(gamma_cf(a, x));
}

double f_cdf(double x, double d1, double d2) {
    if (x <= 0) return 0;
    if (std::isinf(x)) return 1;
    return regularized_beta(d1 * x / (d1 * x + d2), d1 / 2, d2 / 2);
}

double f_sf(double x, double d1, double d2) {
    if (x <= 0) return 1;
    if (std::isinf(x)) return 0;
    return regularized_beta(d2 / (d2 + d1 * x), d2 / 2, d1 / 2);
}

double chi2_cdf(double x, double k) { return regularized_gamma_p(k / 2, x / 2); }
double chi2_sf(double x, double k) { return regularized_gamma_q(k / 2, x / 2); }

std::string_view to_string(LeveneCenter c) noexcept { return c == LeveneCenter::Mean ? "mean" : "median"; }

TestResult levene(const Groups& groups, LeveneCenter center) {
    if (groups.size() < 2) throw audit_error(errc::insufficient_data, "Levene's test needs at least 2 groups");
    for (std::size_t i = 0; i < groups.size(); ++i) {
        if (groups[i].size() < 2) {
            throw audit_error(errc::insufficient_data, "group " + std::to_string(i) + " has fewer than 2 observations");
        }
    }
    const std::size_t k = groups.size();
    std::size_t n_total = 0;
    std::vector<std::vector<double>> z(k);
    std::vector<double> zbar(k);
    double zsum = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const auto& g = groups[i];
        const double c = center == LeveneCenter::Mean ? std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size())
                                                      : median(g);
        for (double y : g) z[i].push_back(std::fabs(y - c));
        zbar[i] = std::accumulate(z[i].begin(), z[i].end(), 0.0) / static_cast<double>(g.size());
        zsum += std::accumulate(z[i].begin(), z[i].end(), 0.0);
        n_total += g.size();
    }
    const double n = static_cast<double>(n_total);
    const double zbar_all = zsum / n;
    double between = 0, within = 0;
    for (std::size_t i = 0; i < k; ++i) {
        between += static_cast<double>(z[i].size()) * (zbar[i] - zbar_all) * (zbar[i] - zbar_all);
        for (double v : z[i]) within += (v - zbar[i]) * (v - zbar[i]);
    }
    TestResult r;
    r.df1 = static_cast<double>(k - 1);
    r.df2 = n - static_cast<double>(k);
    r.n_groups = k;
    r.n_total = n_total;
    if (within == 0) {
        r.statistic = between == 0 ? 0 : std::numeric_limits<double>::infinity();
        r.p_value = between == 0 ? 1 : 0;
        return r;
    }
    r.statistic = (r.df2 / r.df1) * between / within;
    r.p_value = f_sf(r.statistic, r.df1, r.df2);
    return r;
}

std::vector<double> midranks(const std::vector<double>& values) {
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    std::vector<double> ranks(values.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && values[idx[j + 1]] == values[idx[i]]) ++j;
        const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t t = i; t <= j; ++t) ranks[idx[t]] = r;
        i = j + 1;
    }
    return ranks;
}

TestResult kruskal_wallis(const Groups& groups, bool tie_correction) {
    if (groups.size() < 2) throw audit_error(errc::insufficient_data, "Kruskal-Wallis needs at least 2 groups");
    std::vector<double> all;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        if (groups[i].empty()) throw audit_error(errc::insufficient_data, "group " + std::to_string(i) + " is empty");
        all.insert(all.end(), groups[i].begin(), groups[i].end());
    }
    if (all.size() < 3) throw audit_error(errc::insufficient_data, "Kruskal-Wallis needs at least 3 observations");

    const auto ranks = midranks(all);
    const double n = static_cast<double>(all.size());
    double sum = 0;
    std::size_t offset = 0;
    for (const auto& g : groups) {
        double r = 0;
        for (std::size_t i = 0; i < g.size(); ++i) r += ranks[offset + i];
        sum += r * r / static_cast<double>(g.size());
        offset += g.size();
    }
    double h = 12.0 / (n * (n + 1)) * sum - 3 * (n + 1);

    std::vector<double> sorted(all);
    std::sort(sorted.begin(), sorted.end());
    double ties = 0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i);
        ties += t * t * t - t;
        i = j;
    }
    const double correction = 1 - ties / (n * n * n - n);

    TestResult r;
    r.df1 = static_cast<double>(groups.size() - 1);
    r.n_groups = groups.size();
    r.n_total = all.size();
    if (correction <= 0) {  // every observation equal
        r.statistic = 0;
        r.p_value = 1;
        return r;
    }
    if (tie_correction) h /= correction;
    r.statistic = std::max(h, 0.0);
    r.p_value = chi2_sf(r.statistic, r.df1);
    return r;
}

}  // namespace cookieaudit::stats
