#include "rvms/dataset.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace rvms {

namespace fs = std::filesystem;

namespace {

std::map<std::string, fs::path> list_pngs(const fs::path& dir) {
    std::map<std::string, fs::path> out; // stem -> path, lexicographically ordered
    if (!fs::is_directory(dir)) return out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        if (entry.path().extension() != ".png") continue;
        out.emplace(entry.path().stem().string(), entry.path());
    }
    return out;
}

} // namespace

DatasetIndex load_dataset(const fs::path& root) {
    if (!fs::is_directory(root))
        throw std::runtime_error("dataset root is not a directory: " + root.string());

    const auto images = list_pngs(root / "images");
    const auto labels = list_pngs(root / "labels");

    if (images.empty())
        throw std::runtime_error("empty image directory: " + (root / "images").string());

    for (const auto& [stem, path] : labels)
        if (!images.count(stem))
            throw std::runtime_error("label without matching image: " + path.string());

    DatasetIndex index;
    index.domain_id = root.filename().string();
    if (index.domain_id.empty()) // trailing slash
        index.domain_id = root.parent_path().filename().string();

    for (const auto& [stem, path] : images) {
        DatasetEntry e;
        e.image = path;
        if (auto it = labels.find(stem); it != labels.end()) e.label = it->second;
        index.entries.push_back(std::move(e));
    }
    index.role = index.fully_labeled() ? DomainRole::source : DomainRole::target;
    return index;
}

} // namespace rvms
