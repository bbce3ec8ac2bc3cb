#include "rvms/metrics.hpp"

#include "rvms/png_io.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace rvms {

namespace {

void check_shapes(const BinaryMask& a, const BinaryMask& b, const char* what) {
    if (a.width != b.width || a.height != b.height)
        throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

// Exact squared Euclidean distance transform (Meijster et al.), integer
// arithmetic throughout. seeds holds 1 where distance is zero.
std::vector<std::int64_t> squared_edt(const std::vector<std::uint8_t>& seeds, int w, int h) {
    const std::int64_t inf = static_cast<std::int64_t>(w) + h;
    std::vector<std::int64_t> g(static_cast<size_t>(w) * h);

    for (int x = 0; x < w; ++x) {
        g[x] = seeds[x] ? 0 : inf;
        for (int y = 1; y < h; ++y) {
            const size_t i = static_cast<size_t>(y) * w + x;
            g[i] = seeds[i] ? 0 : (g[i - w] < inf ? g[i - w] + 1 : inf);
        }
        for (int y = h - 2; y >= 0; --y) {
            const size_t i = static_cast<size_t>(y) * w + x;
            if (g[i + w] + 1 < g[i]) g[i] = g[i + w] + 1;
        }
    }

    std::vector<std::int64_t> dt(static_cast<size_t>(w) * h);
    std::vector<int> s(w), t(w);
    for (int y = 0; y < h; ++y) {
        const std::int64_t* gy = g.data() + static_cast<size_t>(y) * w;
        auto f = [&](std::int64_t x, std::int64_t i) {
            const std::int64_t dx = x - i;
            return dx * dx + gy[i] * gy[i];
        };
        auto sep = [&](std::int64_t i, std::int64_t u) {
            return (u * u - i * i + gy[u] * gy[u] - gy[i] * gy[i]) / (2 * (u - i));
        };

        int q = 0;
        s[0] = 0;
        t[0] = 0;
        for (int u = 1; u < w; ++u) {
            while (q >= 0 && f(t[q], s[q]) > f(t[q], u)) --q;
            if (q < 0) {
                q = 0;
                s[0] = u;
            } else {
                const std::int64_t ww = 1 + sep(s[q], u);
                if (ww < w) {
                    ++q;
                    s[q] = u;
                    t[q] = static_cast<int>(ww);
                }
            }
        }
        for (int u = w - 1; u >= 0; --u) {
            dt[static_cast<size_t>(y) * w + u] = f(u, s[q]);
            if (u == t[q]) --q;
        }
    }
    return dt;
}

double stddev(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double acc = 0.0;
    for (double x : xs) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

double mean_of(const std::vector<double>& xs) {
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc / static_cast<double>(xs.size());
}

} // namespace

double dice_pct(const BinaryMask& pred, const BinaryMask& gt) {
    check_shapes(pred, gt, "dice_pct");
    size_t inter = 0, sum = 0;
    for (size_t i = 0; i < pred.data.size(); ++i) {
        const bool p = pred.data[i] != 0, g = gt.data[i] != 0;
        inter += (p && g);
        sum += p + g;
    }
    if (sum == 0) return 100.0;
    return 100.0 * 2.0 * static_cast<double>(inter) / static_cast<double>(sum);
}

std::vector<std::pair<int, int>> boundary_pixels(const BinaryMask& mask) {
    std::vector<std::pair<int, int>> out;
    const int w = mask.width, h = mask.height;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask.at(y, x)) continue;
            const bool edge = y == 0 || y == h - 1 || x == 0 || x == w - 1 ||
                              !mask.at(y - 1, x) || !mask.at(y + 1, x) || !mask.at(y, x - 1) ||
                              !mask.at(y, x + 1);
            if (edge) out.emplace_back(y, x);
        }
    }
    return out;
}

double hd95(const BinaryMask& pred, const BinaryMask& gt) {
    check_shapes(pred, gt, "hd95");
    const auto bp = boundary_pixels(pred);
    const auto bg = boundary_pixels(gt);
    if (bp.empty() && bg.empty()) return 0.0;
    if (bp.empty() || bg.empty())
        return std::sqrt(static_cast<double>(pred.height) * pred.height +
                         static_cast<double>(pred.width) * pred.width);

    const int w = pred.width, h = pred.height;
    auto as_seeds = [&](const std::vector<std::pair<int, int>>& pts) {
        std::vector<std::uint8_t> seeds(static_cast<size_t>(w) * h, 0);
        for (const auto& [y, x] : pts) seeds[static_cast<size_t>(y) * w + x] = 1;
        return seeds;
    };
    const auto dt_to_gt = squared_edt(as_seeds(bg), w, h);
    const auto dt_to_pred = squared_edt(as_seeds(bp), w, h);

    std::vector<double> pooled;
    pooled.reserve(bp.size() + bg.size());
    for (const auto& [y, x] : bp)
        pooled.push_back(std::sqrt(static_cast<double>(dt_to_gt[static_cast<size_t>(y) * w + x])));
    for (const auto& [y, x] : bg)
        pooled.push_back(
            std::sqrt(static_cast<double>(dt_to_pred[static_cast<size_t>(y) * w + x])));

    // Nearest-rank ceil(0.95*n), in integer arithmetic.
    const size_t n = pooled.size();
    const size_t k = (95 * n + 99) / 100;
    std::nth_element(pooled.begin(), pooled.begin() + (k - 1), pooled.end());
    return pooled[k - 1];
}

void EvalReport::write_csv(std::ostream& os) const {
    os << "domain_id,n,dice_mean,dice_sd,hd95_mean,hd95_sd\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%d,%.4f,%.4f,%.4f,%.4f\n", r.domain_id.c_str(),
                      r.n_images, r.dice_mean, r.dice_sd, r.hd95_mean, r.hd95_sd);
        os << buf;
    }
    std::snprintf(buf, sizeof(buf), "average,,%.4f,,%.4f,\n", dice_mean_overall,
                  hd95_mean_overall);
    os << buf;
}

void EvalReport::write_table(std::ostream& os) const {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-20s %5s %10s %9s %10s %9s\n", "domain", "n", "dice[%]",
                  "sd", "hd95[px]", "sd");
    os << buf;
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%-20s %5d %10.2f %9.2f %10.2f %9.2f\n",
                      r.domain_id.c_str(), r.n_images, r.dice_mean, r.dice_sd, r.hd95_mean,
                      r.hd95_sd);
        os << buf;
    }
    std::snprintf(buf, sizeof(buf), "%-20s %5s %10.2f %9s %10.2f %9s\n", "average", "",
                  dice_mean_overall, "", hd95_mean_overall, "");
    os << buf;
}

std::string EvalReport::to_json() const {
    nlohmann::json j;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows)
        j["rows"].push_back({{"domain_id", r.domain_id},
                             {"n", r.n_images},
                             {"dice_mean", r.dice_mean},
                             {"dice_sd", r.dice_sd},
                             {"hd95_mean", r.hd95_mean},
                             {"hd95_sd", r.hd95_sd}});
    j["average"] = {{"dice_mean", dice_mean_overall}, {"hd95_mean", hd95_mean_overall}};
    return j.dump(2);
}

EvalReport evaluate(const std::function<BinaryMask(const GrayImage&)>& predictor,
                    const std::vector<DatasetIndex>& targets, int workers) {
    EvalReport report;
    std::vector<double> domain_dice, domain_hd;
    for (const auto& domain : targets) {
        for (const auto& entry : domain.entries)
            if (!entry.label)
                throw std::runtime_error("evaluate: unlabeled entry " + entry.image.string());

        const size_t n = domain.entries.size();
        std::vector<double> dices(n), hds(n);
        auto score_one = [&](size_t i) {
            const auto& entry = domain.entries[i];
            const GrayImage img = load_image(entry.image);
            const BinaryMask gt = load_mask(*entry.label);
            const BinaryMask pred = predictor(img);
            dices[i] = dice_pct(pred, gt);
            hds[i] = hd95(pred, gt);
        };
        if (workers <= 1) {
            for (size_t i = 0; i < n; ++i) score_one(i);
        } else {
            std::atomic<size_t> next{0};
            std::vector<std::thread> pool;
            pool.reserve(workers);
            for (int t = 0; t < workers; ++t)
                pool.emplace_back([&] {
                    for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) score_one(i);
                });
            for (auto& th : pool) th.join();
        }
        EvalRow row;
        row.domain_id = domain.domain_id;
        row.n_images = static_cast<int>(domain.entries.size());
        row.dice_mean = mean_of(dices);
        row.dice_sd = stddev(dices, row.dice_mean);
        row.hd95_mean = mean_of(hds);
        row.hd95_sd = stddev(hds, row.hd95_mean);
        report.rows.push_back(row);
        domain_dice.push_back(row.dice_mean);
        domain_hd.push_back(row.hd95_mean);
    }
    if (!report.rows.empty()) {
        report.dice_mean_overall = mean_of(domain_dice);
        report.hd95_mean_overall = mean_of(domain_hd);
    }
    return report;
}

} // namespace rvms
