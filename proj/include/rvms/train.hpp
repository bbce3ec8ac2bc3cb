#ifndef RVMS_TRAIN_HPP
#define RVMS_TRAIN_HPP

#include "rvms/adam.hpp"
#include "rvms/dataset.hpp"
#include "rvms/image.hpp"
#include "rvms/polarity.hpp"
#include "rvms/rng.hpp"
#include "rvms/segnet.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rvms {

struct Ablations {
    bool no_sa = false;   ///< skip Bezier style augmentation
    bool no_st = false;   ///< skip Fourier style transfer
    bool no_lrit = false; ///< image-only inputs (C_in = 1)
    bool no_kd = false;   ///< single model trained directly on all streams
    bool no_dt = false;   ///< one teacher consumes every stream

    bool any() const { return no_sa || no_st || no_lrit || no_kd || no_dt; }
};

/**
 * @brief Full training configuration; JSON keys mirror these fields exactly.
 *
 * Defaults are the reference settings: tau = 200 teacher epochs followed by
 * 400 joint epochs, Adam lr 1e-3, alpha 0.2, lambda drawn per image from
 * (0, 1) unless fixed.
 */
struct TrainConfig {
    int tau = 200;
    int total_epochs = 600;
    double lr = 1e-3;
    double alpha = 0.2;
    std::optional<double> lambda_fixed; ///< empty = per-image uniform(0,1)
    std::uint64_t seed = 0;
    int batch_size = 1;
    Ablations ablations;
    double threshold = 0.5;

    int input_channels() const { return ablations.no_lrit ? 1 : 5; }
    void validate() const; ///< throws unless 0 < tau < total_epochs etc.

    std::string to_json() const;
    static TrainConfig from_json(const std::string& text);
};

/// The two teachers and the student with their optimizer states.
struct ModelTrio {
    SegNet<float> t_sim, t_dis, student;
    AdamState<float> opt_sim, opt_dis, opt_student;

    static ModelTrio init(const TrainConfig& cfg, SeededRng& rng);
};

/// One epoch of the training log; absent loss terms stay unset, never zero.
struct TrainLogRecord {
    int epoch = 0;
    std::string phase; ///< "teachers" (epoch <= tau) or "joint"
    std::optional<double> l_seg_sim, l_seg_dis, l_kd, l_seg_s;
    double total = 0.0;

    std::string to_json() const;
};

enum class StyleRoute { raw, sim, dis };

/// One network input: the styled image plus its assembled tensor.
struct StyledInput {
    StyleRoute route = StyleRoute::raw;
    GrayImage image;
    Tensor<float> net_input; ///< (C_in, H, W)
};

/// All styled views of one labeled source sample.
struct BatchBundle {
    BinaryMask label;
    std::vector<StyledInput> inputs;
};

/// Channel 0 is the image; channels 1..4 the normalized LRIT planes.
Tensor<float> assemble_input(const GrayImage& img, bool use_lrit, SeededRng* shuffle_rng);

/**
 * @brief Construct one epoch's batches.
 *
 * Per source sample: the raw image, similar- and dissimilar-mode Bezier
 * augmentations (unless no_sa), and one style transfer toward a random
 * donor from each target group (unless no_st or the group is empty). All
 * views share the source label. LRIT channels are shuffled per input when
 * training.
 */
std::vector<BatchBundle> build_batch(const std::vector<std::pair<GrayImage, BinaryMask>>& source,
                                     const std::vector<GrayImage>& sim_targets,
                                     const std::vector<GrayImage>& dis_targets,
                                     const TrainConfig& cfg, SeededRng& rng,
                                     bool shuffle_lrit = true);

/**
 * @brief One teachers-only epoch (epoch <= tau).
 *
 * T_sim takes a Dice step on {raw, similar-augmented, similar-transferred}
 * views, T_dis on {dissimilar-augmented, dissimilar-transferred}; the
 * student is untouched. Under no_dt a single teacher consumes all streams.
 */
TrainLogRecord teacher_epoch(ModelTrio& trio, const std::vector<BatchBundle>& batches,
                             const TrainConfig& cfg, int epoch);

/**
 * @brief One joint epoch (epoch > tau).
 *
 * Teachers update as in teacher_epoch. The student minimizes
 * kd(Q_sim, P_sim) + kd(Q_dis, P_dis) + Dice on the raw source view; no
 * gradient reaches the teachers through the distillation terms.
 */
TrainLogRecord joint_epoch(ModelTrio& trio, const std::vector<BatchBundle>& batches,
                           const TrainConfig& cfg, int epoch);

struct RunResult {
    ModelTrio trio;
    std::vector<TrainLogRecord> logs;
    std::vector<std::pair<std::string, DomainLabel>> labels;
};

/**
 * @brief Full pipeline: cluster targets, train teachers, then distill.
 *
 * Targets participate only as style donors; their labels, if any, are never
 * read. Deterministic given (config, dataset bytes). When out_dir is given,
 * writes t_sim.ckpt, t_dis.ckpt, student.ckpt, log.jsonl and labels.json.
 * A non-finite loss aborts with the offending epoch in the message.
 */
RunResult run(const TrainConfig& cfg, const DatasetIndex& source,
              const std::vector<DatasetIndex>& targets,
              const std::optional<std::filesystem::path>& out_dir = std::nullopt);

/// Threshold the student's probabilities (strictly greater than threshold).
BinaryMask predict(const SegNet<float>& student, const GrayImage& img, bool use_lrit,
                   double threshold);

} // namespace rvms

#endif
