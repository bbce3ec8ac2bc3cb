#include "rvms/bezier.hpp"
#include "rvms/checkpoint.hpp"
#include "rvms/demo.hpp"
#include "rvms/fourier.hpp"
#include "rvms/lrit.hpp"
#include "rvms/metrics.hpp"
#include "rvms/png_io.hpp"
#include "rvms/polarity.hpp"
#include "rvms/synth.hpp"
#include "rvms/train.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rvms;

namespace {

void print_resolved_config(const std::string& subcommand, const json& cfg) {
    json j = cfg;
    j["subcommand"] = subcommand;
    std::cerr << "resolved config: " << j.dump() << "\n";
}

std::vector<fs::path> collect_pngs(const fs::path& in) {
    std::vector<fs::path> files;
    if (fs::is_directory(in)) {
        for (const auto& entry : fs::directory_iterator(in))
            if (entry.is_regular_file() && entry.path().extension() == ".png")
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
    } else {
        files.push_back(in);
    }
    if (files.empty()) throw std::runtime_error("no PNG inputs under " + in.string());
    return files;
}

SynthParams synth_params_from_file(const std::string& path) {
    SynthParams p;
    if (path.empty()) return p;
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read params file: " + path);
    json j;
    is >> j;
    p.min_roots = j.value("min_roots", p.min_roots);
    p.max_roots = j.value("max_roots", p.max_roots);
    p.root_width_min = j.value("root_width_min", p.root_width_min);
    p.root_width_max = j.value("root_width_max", p.root_width_max);
    p.min_width = j.value("min_width", p.min_width);
    p.taper_factor = j.value("taper_factor", p.taper_factor);
    p.step_length = j.value("step_length", p.step_length);
    p.dir_jitter_sd = j.value("dir_jitter_sd", p.dir_jitter_sd);
    p.split_prob = j.value("split_prob", p.split_prob);
    p.max_depth = j.value("max_depth", p.max_depth);
    p.child_width_factor = j.value("child_width_factor", p.child_width_factor);
    p.split_angle_min = j.value("split_angle_min", p.split_angle_min);
    p.split_angle_max = j.value("split_angle_max", p.split_angle_max);
    p.length_frac_min = j.value("length_frac_min", p.length_frac_min);
    p.length_frac_max = j.value("length_frac_max", p.length_frac_max);
    return p;
}

fs::path output_path(const fs::path& input, const std::string& out_dir, const char* suffix) {
    const fs::path dir = out_dir.empty() ? input.parent_path() : fs::path(out_dir);
    return dir / (input.stem().string() + suffix + input.extension().string());
}

int cmd_synth(std::uint64_t seed, int n, const std::string& polarity, const std::string& out,
              int width, int height, double noise_sd, const std::string& params_file) {
    print_resolved_config("synth", {{"seed", seed},
                                    {"n", n},
                                    {"polarity", polarity},
                                    {"out", out},
                                    {"width", width},
                                    {"height", height},
                                    {"noise_sd", noise_sd},
                                    {"params", params_file.empty() ? "default" : params_file}});
    const SynthParams params = synth_params_from_file(params_file);
    const Polarity pol = polarity == "bright" ? Polarity::bright : Polarity::dark;
    fs::create_directories(fs::path(out) / "images");
    fs::create_directories(fs::path(out) / "labels");
    SeededRng rng(seed);
    char name[32];
    for (int i = 0; i < n; ++i) {
        auto [img, mask] = synth_vessels(rng, width, height, pol, noise_sd, params);
        std::snprintf(name, sizeof(name), "img_%03d.png", i);
        save_image(img, fs::path(out) / "images" / name);
        save_mask(mask, fs::path(out) / "labels" / name);
    }
    std::cout << "wrote " << n << " image/label pairs under " << out << "\n";
    return 0;
}

int cmd_augment(const std::string& in, const std::string& mode, std::uint64_t seed,
                const std::string& out, int samples) {
    print_resolved_config(
        "augment", {{"in", in}, {"mode", mode}, {"seed", seed}, {"out", out}, {"samples", samples}});
    const AugmentMode m = mode == "similar" ? AugmentMode::similar : AugmentMode::dissimilar;
    if (!out.empty()) fs::create_directories(out);
    SeededRng rng(seed);
    for (const auto& file : collect_pngs(in)) {
        const GrayImage img = load_image(file);
        const BezierMap map = sample_map(rng, m, samples);
        const fs::path dst = output_path(file, out, "_sa");
        save_image(apply_intensity_map(img, map), dst);
        std::cout << dst.string() << "\n";
    }
    return 0;
}

int cmd_transfer(const std::string& in, const std::string& target_dir, double alpha,
                 const std::string& lambda, std::uint64_t seed, const std::string& out) {
    print_resolved_config("transfer", {{"in", in},
                                       {"target_dir", target_dir},
                                       {"alpha", alpha},
                                       {"lambda", lambda},
                                       {"seed", seed},
                                       {"out", out}});
    std::optional<double> lambda_fixed;
    if (lambda != "random") lambda_fixed = std::stod(lambda);

    std::vector<GrayImage> donors;
    for (const auto& file : collect_pngs(target_dir)) donors.push_back(load_image(file));
    if (!out.empty()) fs::create_directories(out);

    SeededRng rng(seed);
    for (const auto& file : collect_pngs(in)) {
        const GrayImage img = load_image(file);
        const GrayImage& donor = donors[rng.uniform_below(donors.size())];
        const double l = lambda_fixed ? *lambda_fixed : rng.uniform_open();
        const fs::path dst = output_path(file, out, "_st");
        save_image(style_transfer(img, donor, alpha, l), dst);
        std::cout << dst.string() << "\n";
    }
    return 0;
}

int cmd_lrit(const std::string& in, const std::string& out_prefix) {
    print_resolved_config("lrit", {{"in", in}, {"out_prefix", out_prefix}});
    const GrayImage img = load_image(in);
    const LritStack stack = lrit_stack(img);
    const char* names[4] = {"up", "right", "down", "left"};
    for (int i = 0; i < 4; ++i) {
        const auto& ch = stack.channels[i];
        GrayImage vis(ch.width, ch.height);
        for (size_t k = 0; k < ch.data.size(); ++k)
            vis.data[k] = static_cast<float>(ch.data[k]) / 510.0f;
        save_image(vis, out_prefix + std::string("_") + names[i] + ".png");
        save_png16(ch.data, ch.width, ch.height,
                   out_prefix + std::string("_") + names[i] + "_u16.png");
    }
    std::cout << "wrote 4 visualization + 4 lossless planes with prefix " << out_prefix << "\n";
    return 0;
}

std::vector<GrayImage> load_domain_images(const DatasetIndex& index) {
    std::vector<GrayImage> images;
    images.reserve(index.entries.size());
    for (const auto& entry : index.entries) images.push_back(load_image(entry.image));
    return images;
}

int cmd_cluster(const std::string& source_dir, const std::vector<std::string>& target_dirs) {
    print_resolved_config("cluster", {{"source", source_dir}, {"targets", target_dirs}});
    const auto source = load_domain_images(load_dataset(source_dir));
    std::vector<std::pair<std::string, std::vector<GrayImage>>> targets;
    for (const auto& dir : target_dirs) {
        const DatasetIndex index = load_dataset(dir);
        targets.emplace_back(index.domain_id, load_domain_images(index));
    }
    for (const auto& [domain_id, label] : classify_domains(source, targets)) {
        std::printf("%s\t%s\t%.6f\n", domain_id.c_str(),
                    label.label == DomainLabel::Kind::similar ? "similar" : "dissimilar",
                    label.median_score);
    }
    return 0;
}

TrainConfig merge_train_config(const std::string& config_file, CLI::App* cmd,
                               std::uint64_t seed, int tau, int total_epochs, double lr,
                               double alpha, const std::string& lambda, int batch_size,
                               double threshold, const Ablations& ablations) {
    TrainConfig cfg;
    if (!config_file.empty()) {
        std::ifstream is(config_file);
        if (!is) throw std::runtime_error("cannot read config file: " + config_file);
        std::stringstream ss;
        ss << is.rdbuf();
        cfg = TrainConfig::from_json(ss.str());
    }
    // Explicit flags override file values.
    if (cmd->count("--seed")) cfg.seed = seed;
    if (cmd->count("--tau")) cfg.tau = tau;
    if (cmd->count("--total-epochs")) cfg.total_epochs = total_epochs;
    if (cmd->count("--lr")) cfg.lr = lr;
    if (cmd->count("--alpha")) cfg.alpha = alpha;
    if (cmd->count("--lambda")) {
        if (lambda == "random")
            cfg.lambda_fixed.reset();
        else
            cfg.lambda_fixed = std::stod(lambda);
    }
    if (cmd->count("--batch-size")) cfg.batch_size = batch_size;
    if (cmd->count("--threshold")) cfg.threshold = threshold;
    if (cmd->count("--no-sa")) cfg.ablations.no_sa = ablations.no_sa;
    if (cmd->count("--no-st")) cfg.ablations.no_st = ablations.no_st;
    if (cmd->count("--no-lrit")) cfg.ablations.no_lrit = ablations.no_lrit;
    if (cmd->count("--no-kd")) cfg.ablations.no_kd = ablations.no_kd;
    if (cmd->count("--no-dt")) cfg.ablations.no_dt = ablations.no_dt;
    cfg.validate();
    return cfg;
}

int cmd_train(const TrainConfig& cfg, const std::string& source_dir,
              const std::vector<std::string>& target_dirs, const std::string& out) {
    print_resolved_config("train", json::parse(cfg.to_json()));
    const DatasetIndex source = load_dataset(source_dir);
    std::vector<DatasetIndex> targets;
    for (const auto& dir : target_dirs) targets.push_back(load_dataset(dir));
    const RunResult result = run(cfg, source, targets, fs::path(out));
    std::cout << "run complete; artifacts under " << out << "\n";
    for (const auto& [domain_id, label] : result.labels)
        std::cout << "  " << domain_id << ": "
                  << (label.label == DomainLabel::Kind::similar ? "similar" : "dissimilar")
                  << "\n";
    return 0;
}

int cmd_eval(const std::string& student_path, const std::vector<std::string>& target_dirs,
             const std::string& format, int workers) {
    print_resolved_config(
        "eval",
        {{"student", student_path}, {"targets", target_dirs}, {"format", format}, {"workers", workers}});
    const Checkpoint ckpt = load_checkpoint(student_path);
    const TrainConfig cfg = TrainConfig::from_json(ckpt.config_json);
    std::vector<DatasetIndex> targets;
    for (const auto& dir : target_dirs) targets.push_back(load_dataset(dir));

    const bool use_lrit = !cfg.ablations.no_lrit;
    const EvalReport report = evaluate(
        [&](const GrayImage& img) {
            return predict(ckpt.net, img, use_lrit, cfg.threshold);
        },
        targets, workers);

    if (format == "csv")
        report.write_csv(std::cout);
    else if (format == "json")
        std::cout << report.to_json() << "\n";
    else
        report.write_table(std::cout);
    return 0;
}

int cmd_demo(std::uint64_t seed, const std::string& out) {
    print_resolved_config("demo", {{"seed", seed}, {"out", out}});
    const DemoResult result = demo(seed, out);
    std::printf("%-14s %-14s %8s %9s\n", "method", "domain", "dice[%]", "hd95[px]");
    for (const auto& row : result.rows)
        std::printf("%-14s %-14s %8.2f %9.2f\n", row.method.c_str(),
                    row.eval.domain_id.c_str(), row.eval.dice_mean, row.eval.hd95_mean);
    std::cout << "report written to " << (fs::path(out) / "report.csv").string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"RVms: multi-target domain adaptation for vessel segmentation"};
    app.require_subcommand(1);
    int workers = 1;
    app.add_option("--workers", workers,
                   "worker threads for evaluation (results are identical to single-threaded)")
        ->capture_default_str();

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic vascular domain");
    std::uint64_t synth_seed = 0;
    int synth_n = 20, synth_w = 64, synth_h = 64;
    std::string synth_polarity = "bright", synth_out, synth_params;
    double synth_noise = 0.05;
    synth->add_option("--seed", synth_seed, "deterministic seed")->required();
    synth->add_option("--n", synth_n, "number of image/label pairs")->capture_default_str();
    synth->add_option("--polarity", synth_polarity, "bright: vessels brighter than background")
        ->check(CLI::IsMember({"bright", "dark"}))
        ->capture_default_str();
    synth->add_option("--out", synth_out, "output dataset directory")->required();
    synth->add_option("--width", synth_w)->capture_default_str();
    synth->add_option("--height", synth_h)->capture_default_str();
    synth->add_option("--noise-sd", synth_noise, "additive Gaussian noise sd in [0, 0.2]")
        ->capture_default_str();
    synth->add_option("--params", synth_params, "JSON file overriding generator constants");

    // augment
    auto* augment = app.add_subcommand("augment", "Bezier intensity augmentation (suffix _sa)");
    std::string aug_in, aug_mode = "similar", aug_out;
    std::uint64_t aug_seed = 0;
    int aug_samples = 4096;
    augment->add_option("--in", aug_in, "input PNG file or directory")->required();
    augment->add_option("--mode", aug_mode, "similar keeps polarity, dissimilar inverts it")
        ->check(CLI::IsMember({"similar", "dissimilar"}))
        ->capture_default_str();
    augment->add_option("--seed", aug_seed)->required();
    augment->add_option("--out", aug_out, "output directory (default: next to inputs)");
    augment->add_option("--samples", aug_samples, "curve samples in the lookup table")
        ->capture_default_str();

    // transfer
    auto* transfer = app.add_subcommand("transfer", "Fourier amplitude style transfer (suffix _st)");
    std::string tr_in, tr_target, tr_lambda = "random", tr_out;
    double tr_alpha = 0.2;
    std::uint64_t tr_seed = 0;
    transfer->add_option("--in", tr_in, "source PNG file or directory")->required();
    transfer->add_option("--target-dir", tr_target, "directory of style donor PNGs")->required();
    transfer->add_option("--alpha", tr_alpha, "low-frequency mask half-extent in (0, 0.5]")
        ->capture_default_str();
    transfer->add_option("--lambda", tr_lambda, "interpolation rate in [0,1], or 'random'")
        ->capture_default_str();
    transfer->add_option("--seed", tr_seed)->required();
    transfer->add_option("--out", tr_out, "output directory (default: next to inputs)");

    // lrit
    auto* lrit = app.add_subcommand("lrit", "four-direction local relative intensity planes");
    std::string lrit_in, lrit_prefix;
    lrit->add_option("--in", lrit_in, "input PNG")->required();
    lrit->add_option("--out-prefix", lrit_prefix, "output path prefix")->required();

    // cluster
    auto* cluster = app.add_subcommand("cluster", "label target domains similar/dissimilar");
    std::string cl_source;
    std::vector<std::string> cl_targets;
    cluster->add_option("--source", cl_source, "source dataset directory")->required();
    cluster->add_option("--target", cl_targets, "target dataset directories")->required();

    // train
    auto* train = app.add_subcommand("train", "dual-teacher knowledge distillation");
    std::string train_source, train_out, train_config, train_lambda = "random";
    std::vector<std::string> train_targets;
    std::uint64_t train_seed = 0;
    int train_tau = 200, train_total = 600, train_batch = 1;
    double train_lr = 1e-3, train_alpha = 0.2, train_threshold = 0.5;
    Ablations train_ablations;
    train->add_option("--source", train_source, "labeled source dataset directory")->required();
    train->add_option("--target", train_targets, "unlabeled target dataset directories")
        ->required();
    train->add_option("--out", train_out, "run directory for checkpoints and logs")->required();
    train->add_option("--config", train_config, "JSON config (flags override file values)");
    train->add_option("--seed", train_seed)->capture_default_str();
    train->add_option("--tau", train_tau, "teacher-only epochs")->capture_default_str();
    train->add_option("--total-epochs", train_total)->capture_default_str();
    train->add_option("--lr", train_lr, "Adam learning rate")->capture_default_str();
    train->add_option("--alpha", train_alpha, "style transfer mask half-extent")
        ->capture_default_str();
    train->add_option("--lambda", train_lambda, "fixed interpolation rate or 'random'")
        ->capture_default_str();
    train->add_option("--batch-size", train_batch)->capture_default_str();
    train->add_option("--threshold", train_threshold, "prediction threshold")
        ->capture_default_str();
    train->add_flag("--no-sa", train_ablations.no_sa, "ablation: skip style augmentation");
    train->add_flag("--no-st", train_ablations.no_st, "ablation: skip style transfer");
    train->add_flag("--no-lrit", train_ablations.no_lrit, "ablation: image-only inputs");
    train->add_flag("--no-kd", train_ablations.no_kd, "ablation: no distillation");
    train->add_flag("--no-dt", train_ablations.no_dt, "ablation: single teacher");

    // eval
    auto* eval = app.add_subcommand("eval", "evaluate a student checkpoint (Dice[%], HD95[px])");
    std::string eval_student, eval_format = "table";
    std::vector<std::string> eval_targets;
    eval->add_option("--student", eval_student, "student checkpoint path")->required();
    eval->add_option("--target", eval_targets, "labeled target dataset directories")->required();
    eval->add_option("--format", eval_format)
        ->check(CLI::IsMember({"table", "csv", "json"}))
        ->capture_default_str();

    // demo
    auto* demo_cmd = app.add_subcommand("demo", "end-to-end desk-scale benchmark");
    std::uint64_t demo_seed = 1;
    std::string demo_out;
    demo_cmd->add_option("--seed", demo_seed)->capture_default_str();
    demo_cmd->add_option("--out", demo_out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*synth)
            return cmd_synth(synth_seed, synth_n, synth_polarity, synth_out, synth_w, synth_h,
                             synth_noise, synth_params);
        if (*augment) return cmd_augment(aug_in, aug_mode, aug_seed, aug_out, aug_samples);
        if (*transfer)
            return cmd_transfer(tr_in, tr_target, tr_alpha, tr_lambda, tr_seed, tr_out);
        if (*lrit) return cmd_lrit(lrit_in, lrit_prefix);
        if (*cluster) return cmd_cluster(cl_source, cl_targets);
        if (*train) {
            const TrainConfig cfg =
                merge_train_config(train_config, train, train_seed, train_tau, train_total,
                                   train_lr, train_alpha, train_lambda, train_batch,
                                   train_threshold, train_ablations);
            return cmd_train(cfg, train_source, train_targets, train_out);
        }
        if (*eval) return cmd_eval(eval_student, eval_targets, eval_format, workers);
        if (*demo_cmd) return cmd_demo(demo_seed, demo_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
