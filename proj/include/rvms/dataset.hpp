#ifndef RVMS_DATASET_HPP
#define RVMS_DATASET_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace rvms {

enum class DomainRole { source, target };

struct DatasetEntry {
    std::filesystem::path image;
    std::optional<std::filesystem::path> label;
};

/**
 * @brief Sorted index of one image domain on disk.
 *
 * Layout: root/images/*.png with optional root/labels/*.png paired by exact
 * filename stem. Entry order is lexicographic in the image filename, never
 * filesystem enumeration order. Source domains must be fully labeled;
 * target domains may omit labels.
 */
struct DatasetIndex {
    std::string domain_id;
    DomainRole role = DomainRole::target;
    std::vector<DatasetEntry> entries;

    bool fully_labeled() const {
        for (const auto& e : entries)
            if (!e.label) return false;
        return true;
    }
};

/**
 * @brief Index a dataset directory.
 *
 * The role is inferred: fully labeled directories qualify as source, any
 * unlabeled entry forces target. Throws on an empty image directory or on a
 * label file without a matching image.
 */
DatasetIndex load_dataset(const std::filesystem::path& root);

} // namespace rvms

#endif
