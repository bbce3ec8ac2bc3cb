#include "rvms/train.hpp"

#include "rvms/bezier.hpp"
#include "rvms/checkpoint.hpp"
#include "rvms/fourier.hpp"
#include "rvms/losses.hpp"
#include "rvms/lrit.hpp"
#include "rvms/png_io.hpp"

#include "json.hpp"

#include <fstream>
#include <stdexcept>

namespace rvms {

using nlohmann::json;

void TrainConfig::validate() const {
    if (!(tau > 0 && tau < total_epochs))
        throw std::invalid_argument("TrainConfig: requires 0 < tau < total_epochs");
    if (!(lr > 0.0)) throw std::invalid_argument("TrainConfig: lr must be positive");
    if (!(alpha > 0.0 && alpha <= 0.5))
        throw std::invalid_argument("TrainConfig: alpha must be in (0, 0.5]");
    if (lambda_fixed && !(*lambda_fixed >= 0.0 && *lambda_fixed <= 1.0))
        throw std::invalid_argument("TrainConfig: fixed lambda must be in [0, 1]");
    if (batch_size < 1) throw std::invalid_argument("TrainConfig: batch_size must be >= 1");
    if (!(threshold >= 0.0 && threshold < 1.0))
        throw std::invalid_argument("TrainConfig: threshold must be in [0, 1)");
}

std::string TrainConfig::to_json() const {
    json j;
    j["tau"] = tau;
    j["total_epochs"] = total_epochs;
    j["lr"] = lr;
    j["alpha"] = alpha;
    if (lambda_fixed)
        j["lambda_mode"] = *lambda_fixed;
    else
        j["lambda_mode"] = "random";
    j["seed"] = seed;
    j["batch_size"] = batch_size;
    j["ablations"] = {{"no_sa", ablations.no_sa},
                      {"no_st", ablations.no_st},
                      {"no_lrit", ablations.no_lrit},
                      {"no_kd", ablations.no_kd},
                      {"no_dt", ablations.no_dt}};
    j["threshold"] = threshold;
    return j.dump();
}

TrainConfig TrainConfig::from_json(const std::string& text) {
    const json j = json::parse(text);
    TrainConfig cfg;
    cfg.tau = j.value("tau", cfg.tau);
    cfg.total_epochs = j.value("total_epochs", cfg.total_epochs);
    cfg.lr = j.value("lr", cfg.lr);
    cfg.alpha = j.value("alpha", cfg.alpha);
    if (j.contains("lambda_mode")) {
        const auto& lm = j["lambda_mode"];
        if (lm.is_string()) {
            if (lm.get<std::string>() != "random")
                throw std::invalid_argument("TrainConfig: lambda_mode must be \"random\" or a number");
            cfg.lambda_fixed.reset();
        } else {
            cfg.lambda_fixed = lm.get<double>();
        }
    }
    cfg.seed = j.value("seed", cfg.seed);
    cfg.batch_size = j.value("batch_size", cfg.batch_size);
    if (j.contains("ablations")) {
        const auto& a = j["ablations"];
        cfg.ablations.no_sa = a.value("no_sa", false);
        cfg.ablations.no_st = a.value("no_st", false);
        cfg.ablations.no_lrit = a.value("no_lrit", false);
        cfg.ablations.no_kd = a.value("no_kd", false);
        cfg.ablations.no_dt = a.value("no_dt", false);
    }
    cfg.threshold = j.value("threshold", cfg.threshold);
    cfg.validate();
    return cfg;
}

ModelTrio ModelTrio::init(const TrainConfig& cfg, SeededRng& rng) {
    ModelTrio trio;
    const int c_in = cfg.input_channels();
    trio.t_sim = SegNet<float>::he_init(c_in, rng);
    trio.t_dis = SegNet<float>::he_init(c_in, rng);
    trio.student = SegNet<float>::he_init(c_in, rng);
    trio.opt_sim = AdamState<float>::like(trio.t_sim, cfg.lr);
    trio.opt_dis = AdamState<float>::like(trio.t_dis, cfg.lr);
    trio.opt_student = AdamState<float>::like(trio.student, cfg.lr);
    return trio;
}

std::string TrainLogRecord::to_json() const {
    json j;
    j["epoch"] = epoch;
    j["phase"] = phase;
    auto put = [&](const char* key, const std::optional<double>& v) {
        if (v)
            j[key] = *v;
        else
            j[key] = nullptr;
    };
    put("l_seg_sim", l_seg_sim);
    put("l_seg_dis", l_seg_dis);
    put("l_kd", l_kd);
    put("l_seg_s", l_seg_s);
    j["total"] = total;
    return j.dump();
}

Tensor<float> assemble_input(const GrayImage& img, bool use_lrit, SeededRng* shuffle_rng) {
    const int c_in = use_lrit ? 5 : 1;
    Tensor<float> input({c_in, img.height, img.width});
    std::copy(img.data.begin(), img.data.end(), input.data.begin());
    if (use_lrit) {
        LritStack stack = lrit_stack(img);
        if (shuffle_rng) stack = shuffle_stack(stack, *shuffle_rng);
        const auto planes = normalize_stack(stack);
        std::copy(planes.begin(), planes.end(), input.data.begin() + img.pixel_count());
    }
    return input;
}

std::vector<BatchBundle> build_batch(const std::vector<std::pair<GrayImage, BinaryMask>>& source,
                                     const std::vector<GrayImage>& sim_targets,
                                     const std::vector<GrayImage>& dis_targets,
                                     const TrainConfig& cfg, SeededRng& rng, bool shuffle_lrit) {
    const bool use_lrit = !cfg.ablations.no_lrit;
    SeededRng* lrit_rng = shuffle_lrit ? &rng : nullptr;

    std::vector<BatchBundle> bundles;
    bundles.reserve(source.size());
    for (const auto& [image, label] : source) {
        BatchBundle bundle;
        bundle.label = label;

        auto add = [&](StyleRoute route, GrayImage styled) {
            StyledInput input;
            input.route = route;
            input.net_input = assemble_input(styled, use_lrit, lrit_rng);
            input.image = std::move(styled);
            bundle.inputs.push_back(std::move(input));
        };

        add(StyleRoute::raw, image);
        if (!cfg.ablations.no_sa) {
            add(StyleRoute::sim, apply_intensity_map(image, sample_map(rng, AugmentMode::similar)));
            add(StyleRoute::dis,
                apply_intensity_map(image, sample_map(rng, AugmentMode::dissimilar)));
        }
        if (!cfg.ablations.no_st) {
            if (!sim_targets.empty()) {
                const auto& donor = sim_targets[rng.uniform_below(sim_targets.size())];
                const double lambda = cfg.lambda_fixed ? *cfg.lambda_fixed : rng.uniform_open();
                add(StyleRoute::sim, style_transfer(image, donor, cfg.alpha, lambda));
            }
            if (!dis_targets.empty()) {
                const auto& donor = dis_targets[rng.uniform_below(dis_targets.size())];
                const double lambda = cfg.lambda_fixed ? *cfg.lambda_fixed : rng.uniform_open();
                add(StyleRoute::dis, style_transfer(image, donor, cfg.alpha, lambda));
            }
        }
        bundles.push_back(std::move(bundle));
    }
    return bundles;
}

namespace {

struct StreamAccumulator {
    Gradients<float> grads;
    double loss_sum = 0.0;
    int n_losses = 0; ///< styled views that contributed
    int n_steps = 0;  ///< bundles that contributed
};

// Dice step for one teacher over its stream within a bundle; gradients are
// averaged over the stream's views.
double teacher_bundle_loss(SegNet<float>& net, const BatchBundle& bundle,
                           const std::vector<const StyledInput*>& stream,
                           Gradients<float>& grads_out) {
    double loss_mean = 0.0;
    const double scale = 1.0 / static_cast<double>(stream.size());
    for (const StyledInput* input : stream) {
        auto [prob, tape] = forward(net, input->net_input);
        const auto loss = dice_loss(prob, bundle.label);
        loss_mean += loss.value * scale;
        Tensor<float> d_prob = loss.d_prob;
        for (auto& v : d_prob.data) v = static_cast<float>(v * scale);
        accumulate(grads_out, backward(net, tape, d_prob));
    }
    return loss_mean;
}

std::vector<const StyledInput*> select_stream(const BatchBundle& bundle, bool sim_side,
                                              bool single_teacher) {
    std::vector<const StyledInput*> out;
    for (const auto& input : bundle.inputs) {
        const bool in_sim = input.route != StyleRoute::dis; // raw trains the similar teacher
        if (single_teacher || in_sim == sim_side) out.push_back(&input);
    }
    return out;
}

void update_teachers(ModelTrio& trio, const std::vector<BatchBundle>& batches,
                     const TrainConfig& cfg, StreamAccumulator& sim_acc,
                     StreamAccumulator& dis_acc) {
    const bool single = cfg.ablations.no_dt;
    int in_group = 0;
    Gradients<float> g_sim, g_dis;
    int group_sim = 0, group_dis = 0;

    auto flush = [&]() {
        if (group_sim > 0) {
            if (group_sim > 1) {
                const float inv = 1.0f / static_cast<float>(group_sim);
                for (int l = 0; l < 4; ++l) {
                    for (auto& v : g_sim.weight[l].data) v *= inv;
                    for (auto& v : g_sim.bias[l].data) v *= inv;
                }
            }
            adam_step(trio.t_sim, g_sim, trio.opt_sim);
        }
        if (group_dis > 0) {
            if (group_dis > 1) {
                const float inv = 1.0f / static_cast<float>(group_dis);
                for (int l = 0; l < 4; ++l) {
                    for (auto& v : g_dis.weight[l].data) v *= inv;
                    for (auto& v : g_dis.bias[l].data) v *= inv;
                }
            }
            adam_step(trio.t_dis, g_dis, trio.opt_dis);
        }
        g_sim = Gradients<float>();
        g_dis = Gradients<float>();
        group_sim = group_dis = in_group = 0;
    };

    for (const auto& bundle : batches) {
        const auto sim_stream = select_stream(bundle, true, single);
        if (!sim_stream.empty()) {
            sim_acc.loss_sum += teacher_bundle_loss(trio.t_sim, bundle, sim_stream, g_sim);
            sim_acc.n_losses += 1;
            ++group_sim;
        }
        if (!single) {
            const auto dis_stream = select_stream(bundle, false, false);
            if (!dis_stream.empty()) {
                dis_acc.loss_sum += teacher_bundle_loss(trio.t_dis, bundle, dis_stream, g_dis);
                dis_acc.n_losses += 1;
                ++group_dis;
            }
        }
        if (++in_group == cfg.batch_size) flush();
    }
    if (in_group > 0) flush();
}

std::optional<double> finish_mean(const StreamAccumulator& acc) {
    if (acc.n_losses == 0) return std::nullopt;
    return acc.loss_sum / acc.n_losses;
}

} // namespace

TrainLogRecord teacher_epoch(ModelTrio& trio, const std::vector<BatchBundle>& batches,
                             const TrainConfig& cfg, int epoch) {
    if (batches.empty()) throw std::invalid_argument("teacher_epoch: empty batch");

    StreamAccumulator sim_acc, dis_acc;
    update_teachers(trio, batches, cfg, sim_acc, dis_acc);

    TrainLogRecord rec;
    rec.epoch = epoch;
    rec.phase = "teachers";
    rec.l_seg_sim = finish_mean(sim_acc);
    rec.l_seg_dis = finish_mean(dis_acc);
    rec.total = rec.l_seg_sim.value_or(0.0) + rec.l_seg_dis.value_or(0.0);
    return rec;
}

TrainLogRecord joint_epoch(ModelTrio& trio, const std::vector<BatchBundle>& batches,
                           const TrainConfig& cfg, int epoch) {
    if (batches.empty()) throw std::invalid_argument("joint_epoch: empty batch");

    StreamAccumulator sim_acc, dis_acc;
    update_teachers(trio, batches, cfg, sim_acc, dis_acc);

    double kd_sum = 0.0, seg_s_sum = 0.0;
    int kd_count = 0, seg_s_count = 0;

    int in_group = 0, group_n = 0;
    Gradients<float> g_student;
    auto flush = [&]() {
        if (group_n > 0) {
            if (group_n > 1) {
                const float inv = 1.0f / static_cast<float>(group_n);
                for (int l = 0; l < 4; ++l) {
                    for (auto& v : g_student.weight[l].data) v *= inv;
                    for (auto& v : g_student.bias[l].data) v *= inv;
                }
            }
            adam_step(trio.student, g_student, trio.opt_student);
        }
        g_student = Gradients<float>();
        in_group = group_n = 0;
    };

    for (const auto& bundle : batches) {
        // Groundtruth supervision on the raw source view.
        const StyledInput* raw = nullptr;
        std::vector<const StyledInput*> sim_styled, dis_styled;
        for (const auto& input : bundle.inputs) {
            if (input.route == StyleRoute::raw)
                raw = &input;
            else if (input.route == StyleRoute::sim)
                sim_styled.push_back(&input);
            else
                dis_styled.push_back(&input);
        }

        double bundle_kd = 0.0;
        {
            auto [prob, tape] = forward(trio.student, raw->net_input);
            const auto loss = dice_loss(prob, bundle.label);
            seg_s_sum += loss.value;
            seg_s_count += 1;
            accumulate(g_student, backward(trio.student, tape, loss.d_prob));
        }

        auto distill = [&](const std::vector<const StyledInput*>& styled,
                           const SegNet<float>& teacher) {
            if (styled.empty()) return false;
            const double scale = 1.0 / static_cast<double>(styled.size());
            for (const StyledInput* input : styled) {
                const Tensor<float> teacher_prob = forward_prob(teacher, input->net_input);
                auto [student_prob, student_tape] = forward(trio.student, input->net_input);
                const auto loss = kd_loss(student_prob, teacher_prob);
                bundle_kd += loss.value * scale;
                Tensor<float> d_prob = loss.d_prob;
                for (auto& v : d_prob.data) v = static_cast<float>(v * scale);
                accumulate(g_student, backward(trio.student, student_tape, d_prob));
            }
            return true;
        };

        const SegNet<float>& sim_teacher = trio.t_sim;
        const SegNet<float>& dis_teacher = cfg.ablations.no_dt ? trio.t_sim : trio.t_dis;
        bool any_kd = distill(sim_styled, sim_teacher);
        any_kd = distill(dis_styled, dis_teacher) || any_kd;
        if (any_kd) {
            kd_sum += bundle_kd;
            kd_count += 1;
        }

        ++group_n;
        if (++in_group == cfg.batch_size) flush();
    }
    if (in_group > 0) flush();

    TrainLogRecord rec;
    rec.epoch = epoch;
    rec.phase = "joint";
    rec.l_seg_sim = finish_mean(sim_acc);
    rec.l_seg_dis = finish_mean(dis_acc);
    rec.l_kd = kd_count ? std::optional<double>(kd_sum / kd_count) : std::nullopt;
    rec.l_seg_s = seg_s_count ? std::optional<double>(seg_s_sum / seg_s_count) : std::nullopt;
    rec.total = rec.l_seg_sim.value_or(0.0) + rec.l_seg_dis.value_or(0.0) +
                rec.l_kd.value_or(0.0) + rec.l_seg_s.value_or(0.0);
    return rec;
}

namespace {

// no_kd ablation: one model (the student) trained directly on every stream.
TrainLogRecord student_direct_epoch(ModelTrio& trio, const std::vector<BatchBundle>& batches,
                                    const TrainConfig& cfg, int epoch) {
    if (batches.empty()) throw std::invalid_argument("student_direct_epoch: empty batch");

    double loss_sum = 0.0;
    int in_group = 0, group_n = 0;
    Gradients<float> grads;
    auto flush = [&]() {
        if (group_n > 0) {
            if (group_n > 1) {
                const float inv = 1.0f / static_cast<float>(group_n);
                for (int l = 0; l < 4; ++l) {
                    for (auto& v : grads.weight[l].data) v *= inv;
                    for (auto& v : grads.bias[l].data) v *= inv;
                }
            }
            adam_step(trio.student, grads, trio.opt_student);
        }
        grads = Gradients<float>();
        in_group = group_n = 0;
    };

    for (const auto& bundle : batches) {
        std::vector<const StyledInput*> stream;
        for (const auto& input : bundle.inputs) stream.push_back(&input);
        loss_sum += teacher_bundle_loss(trio.student, bundle, stream, grads);
        ++group_n;
        if (++in_group == cfg.batch_size) flush();
    }
    if (in_group > 0) flush();

    TrainLogRecord rec;
    rec.epoch = epoch;
    rec.phase = epoch <= cfg.tau ? "teachers" : "joint";
    rec.l_seg_s = loss_sum / static_cast<double>(batches.size());
    rec.total = *rec.l_seg_s;
    return rec;
}

} // namespace

RunResult run(const TrainConfig& cfg, const DatasetIndex& source,
              const std::vector<DatasetIndex>& targets,
              const std::optional<std::filesystem::path>& out_dir) {
    cfg.validate();
    if (!source.fully_labeled())
        throw std::runtime_error("run: source dataset has unlabeled entries");

    std::vector<std::pair<GrayImage, BinaryMask>> source_data;
    source_data.reserve(source.entries.size());
    std::vector<GrayImage> source_images;
    for (const auto& entry : source.entries) {
        GrayImage img = load_image(entry.image);
        source_images.push_back(img);
        source_data.emplace_back(std::move(img), load_mask(*entry.label));
    }

    std::vector<std::pair<std::string, std::vector<GrayImage>>> target_images;
    for (const auto& domain : targets) {
        std::vector<GrayImage> images;
        images.reserve(domain.entries.size());
        for (const auto& entry : domain.entries) images.push_back(load_image(entry.image));
        target_images.emplace_back(domain.domain_id, std::move(images));
    }

    RunResult result;
    result.labels = classify_domains(source_images, target_images);

    std::vector<GrayImage> sim_donors, dis_donors;
    for (size_t d = 0; d < target_images.size(); ++d) {
        auto& pool = result.labels[d].second.label == DomainLabel::Kind::similar ? sim_donors
                                                                                 : dis_donors;
        for (auto& img : target_images[d].second) pool.push_back(std::move(img));
    }

    SeededRng rng(cfg.seed);
    result.trio = ModelTrio::init(cfg, rng);

    for (int epoch = 1; epoch <= cfg.total_epochs; ++epoch) {
        const auto batches = build_batch(source_data, sim_donors, dis_donors, cfg, rng);
        try {
            TrainLogRecord rec;
            if (cfg.ablations.no_kd)
                rec = student_direct_epoch(result.trio, batches, cfg, epoch);
            else if (epoch <= cfg.tau)
                rec = teacher_epoch(result.trio, batches, cfg, epoch);
            else
                rec = joint_epoch(result.trio, batches, cfg, epoch);
            result.logs.push_back(std::move(rec));
        } catch (const std::runtime_error& e) {
            throw std::runtime_error("epoch " + std::to_string(epoch) + ": " + e.what());
        }
    }

    if (out_dir) {
        std::filesystem::create_directories(*out_dir);
        const std::string cfg_json = cfg.to_json();
        save_checkpoint(result.trio.t_sim, cfg_json, *out_dir / "t_sim.ckpt");
        save_checkpoint(result.trio.t_dis, cfg_json, *out_dir / "t_dis.ckpt");
        save_checkpoint(result.trio.student, cfg_json, *out_dir / "student.ckpt");

        std::ofstream log_file(*out_dir / "log.jsonl");
        for (const auto& rec : result.logs) log_file << rec.to_json() << "\n";

        json labels = json::array();
        for (const auto& [domain_id, label] : result.labels)
            labels.push_back(
                {{"domain_id", domain_id},
                 {"label",
                  label.label == DomainLabel::Kind::similar ? "similar" : "dissimilar"},
                 {"median_score", label.median_score}});
        std::ofstream labels_file(*out_dir / "labels.json");
        labels_file << labels.dump(2) << "\n";
    }
    return result;
}

BinaryMask predict(const SegNet<float>& student, const GrayImage& img, bool use_lrit,
                   double threshold) {
    const Tensor<float> input = assemble_input(img, use_lrit, nullptr);
    const Tensor<float> prob = forward_prob(student, input);
    BinaryMask mask(img.width, img.height);
    for (size_t i = 0; i < mask.data.size(); ++i)
        mask.data[i] = prob.data[i] > threshold ? 1 : 0;
    return mask;
}

} // namespace rvms
