#ifndef RVMS_METRICS_HPP
#define RVMS_METRICS_HPP

#include "rvms/dataset.hpp"
#include "rvms/image.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace rvms {

/**
 * @brief Dice overlap in percent: 100 * 2|P∩G| / (|P| + |G|).
 *
 * Two empty masks score 100.0. Throws on shape mismatch.
 */
double dice_pct(const BinaryMask& pred, const BinaryMask& gt);

/**
 * @brief 95% Hausdorff distance between mask boundaries, in pixels.
 *
 * Boundary pixels are foreground pixels with at least one background
 * 4-neighbor (the image border counts as background). Directed
 * boundary-to-boundary Euclidean distances are pooled from both directions
 * and the 95th percentile is taken by the nearest-rank rule (the
 * ceil(0.95*n)-th smallest). Both masks empty gives 0; exactly one empty
 * gives the image diagonal sqrt(H^2 + W^2) as a finite sentinel.
 */
double hd95(const BinaryMask& pred, const BinaryMask& gt);

/// Boundary pixels as (row, col) pairs, in row-major order.
std::vector<std::pair<int, int>> boundary_pixels(const BinaryMask& mask);

struct EvalRow {
    std::string domain_id;
    int n_images = 0;
    double dice_mean = 0.0;
    double dice_sd = 0.0;
    double hd95_mean = 0.0;
    double hd95_sd = 0.0;
};

/**
 * @brief Per-domain evaluation table plus unweighted overall averages.
 */
struct EvalReport {
    std::vector<EvalRow> rows;
    double dice_mean_overall = 0.0;
    double hd95_mean_overall = 0.0;

    void write_csv(std::ostream& os) const;
    void write_table(std::ostream& os) const;
    std::string to_json() const;
};

/**
 * @brief Evaluate a predictor over labeled target domains.
 *
 * Every entry must carry a groundtruth label. Per-image Dice and HD95 are
 * aggregated per domain (mean and sample sd); the overall row is the
 * unweighted mean over domains. Deterministic: with workers > 1 the images
 * are scored in parallel but collected in index order, so the report is
 * identical to the single-threaded one.
 */
EvalReport evaluate(const std::function<BinaryMask(const GrayImage&)>& predictor,
                    const std::vector<DatasetIndex>& targets, int workers = 1);

} // namespace rvms

#endif
