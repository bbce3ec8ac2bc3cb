#ifndef RVMS_DEMO_HPP
#define RVMS_DEMO_HPP

#include "rvms/metrics.hpp"
#include "rvms/train.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace rvms {

/// One comparison row of the demo report.
struct DemoRow {
    std::string method; ///< "source_only" or "dtkd"
    EvalRow eval;
};

struct DemoResult {
    std::vector<DemoRow> rows;
    std::vector<std::pair<std::string, DomainLabel>> labels;

    double dice(const std::string& method, const std::string& domain_id) const;
};

/**
 * @brief One-command end-to-end benchmark at desk scale.
 *
 * Synthesizes a bright source domain (40 images), a bright target with
 * different stroke statistics (20) and a dark target (20) at 64x64, clusters
 * the targets, trains the full dual-teacher pipeline (tau = 30, 120 epochs)
 * plus a source-only baseline, and evaluates both students on both targets.
 * Writes datasets, checkpoints, log.jsonl, labels.json and report.csv under
 * out_dir. Byte-identical outputs for identical seeds.
 */
DemoResult demo(std::uint64_t seed, const std::filesystem::path& out_dir);

/// The desk-scale training configuration used by demo().
TrainConfig demo_train_config(std::uint64_t seed);

} // namespace rvms

#endif
