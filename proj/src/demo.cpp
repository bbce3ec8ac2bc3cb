#include "rvms/demo.hpp"

#include "rvms/png_io.hpp"
#include "rvms/synth.hpp"

#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace rvms {

namespace fs = std::filesystem;

namespace {

constexpr int kImageSize = 64;
// The benchmark is noise-free: the trainability of the dissimilar branch at
// this model scale depends on clean local intensity order; the noise_sd knob
// stays exercised by the generator's own tests.
constexpr double kNoiseSd = 0.0;

void write_domain(SeededRng& rng, const fs::path& root, int count, Polarity polarity,
                  const SynthParams& params) {
    fs::create_directories(root / "images");
    fs::create_directories(root / "labels");
    char name[32];
    for (int i = 0; i < count; ++i) {
        auto [img, mask] = synth_vessels(rng, kImageSize, kImageSize, polarity, kNoiseSd, params);
        std::snprintf(name, sizeof(name), "img_%03d.png", i);
        save_image(img, root / "images" / name);
        save_mask(mask, root / "labels" / name);
    }
}

// Thinner, busier vessels: the "different stroke statistics" target.
SynthParams thin_params() {
    SynthParams p;
    p.min_roots = 4;
    p.max_roots = 7;
    p.root_width_min = 1.2;
    p.root_width_max = 2.5;
    p.dir_jitter_sd = 0.30;
    p.split_prob = 0.14;
    return p;
}

} // namespace

TrainConfig demo_train_config(std::uint64_t seed) {
    TrainConfig cfg;
    cfg.tau = 30;
    cfg.total_epochs = 120;
    cfg.seed = seed;
    return cfg;
}

double DemoResult::dice(const std::string& method, const std::string& domain_id) const {
    for (const auto& row : rows)
        if (row.method == method && row.eval.domain_id == domain_id) return row.eval.dice_mean;
    throw std::invalid_argument("demo: no row for " + method + "/" + domain_id);
}

DemoResult demo(std::uint64_t seed, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    SeededRng master(seed);

    SeededRng rng_source = master.split();
    SeededRng rng_sim = master.split();
    SeededRng rng_dis = master.split();
    const std::uint64_t dtkd_seed = master.next_u64();
    const std::uint64_t so_seed = master.next_u64();

    const fs::path source_dir = out_dir / "source";
    const fs::path sim_dir = out_dir / "target_sim";
    const fs::path dis_dir = out_dir / "target_dis";
    write_domain(rng_source, source_dir, 40, Polarity::bright, SynthParams{});
    write_domain(rng_sim, sim_dir, 20, Polarity::bright, thin_params());
    write_domain(rng_dis, dis_dir, 20, Polarity::dark, SynthParams{});

    const DatasetIndex source = load_dataset(source_dir);
    const std::vector<DatasetIndex> targets = {load_dataset(sim_dir), load_dataset(dis_dir)};

    TrainConfig dtkd_cfg = demo_train_config(dtkd_seed);
    RunResult dtkd = run(dtkd_cfg, source, targets, out_dir / "dtkd");

    TrainConfig so_cfg = demo_train_config(so_seed);
    so_cfg.ablations = {true, true, true, true, true};
    RunResult source_only = run(so_cfg, source, targets, out_dir / "source_only");

    DemoResult result;
    result.labels = dtkd.labels;

    auto add_rows = [&](const char* method, const RunResult& arm, const TrainConfig& cfg) {
        const bool use_lrit = !cfg.ablations.no_lrit;
        const EvalReport report = evaluate(
            [&](const GrayImage& img) {
                return predict(arm.trio.student, img, use_lrit, cfg.threshold);
            },
            targets);
        for (const auto& row : report.rows) result.rows.push_back({method, row});
    };
    add_rows("source_only", source_only, so_cfg);
    add_rows("dtkd", dtkd, dtkd_cfg);

    std::ofstream csv(out_dir / "report.csv");
    csv << "method,domain_id,n,dice_mean,dice_sd,hd95_mean,hd95_sd\n";
    char buf[256];
    for (const auto& row : result.rows) {
        std::snprintf(buf, sizeof(buf), "%s,%s,%d,%.4f,%.4f,%.4f,%.4f\n", row.method.c_str(),
                      row.eval.domain_id.c_str(), row.eval.n_images, row.eval.dice_mean,
                      row.eval.dice_sd, row.eval.hd95_mean, row.eval.hd95_sd);
        csv << buf;
    }

    nlohmann::json labels = nlohmann::json::array();
    for (const auto& [domain_id, label] : result.labels)
        labels.push_back(
            {{"domain_id", domain_id},
             {"label", label.label == DomainLabel::Kind::similar ? "similar" : "dissimilar"},
             {"median_score", label.median_score}});
    std::ofstream labels_file(out_dir / "labels.json");
    labels_file << labels.dump(2) << "\n";

    return result;
}

} // namespace rvms
