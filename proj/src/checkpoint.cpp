#include "rvms/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace rvms {

namespace {

constexpr char kMagic[8] = {'R', 'V', 'M', 'S', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "checkpoint serialization assumes a little-endian host");

template <typename T>
void write_pod(std::ostream& os, const T& value) {
    os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
    T value;
    is.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!is) throw std::runtime_error("checkpoint: truncated file");
    return value;
}

} // namespace

void save_checkpoint(const SegNet<float>& net, const std::string& config_json,
                     const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("checkpoint: cannot open for writing: " + path.string());

    os.write(kMagic, sizeof(kMagic));
    write_pod(os, kVersion);
    write_pod(os, static_cast<std::uint32_t>(net.in_channels));
    write_pod(os, static_cast<std::uint32_t>(net.layers.size()));
    for (const auto& layer : net.layers) {
        write_pod(os, static_cast<std::uint32_t>(layer.out_c));
        write_pod(os, static_cast<std::uint32_t>(layer.in_c));
        write_pod(os, static_cast<std::uint32_t>(3));
        write_pod(os, static_cast<std::uint32_t>(3));
        os.write(reinterpret_cast<const char*>(layer.weight.data.data()),
                 static_cast<std::streamsize>(layer.weight.data.size() * sizeof(float)));
        os.write(reinterpret_cast<const char*>(layer.bias.data.data()),
                 static_cast<std::streamsize>(layer.bias.data.size() * sizeof(float)));
    }
    write_pod(os, static_cast<std::uint64_t>(config_json.size()));
    os.write(config_json.data(), static_cast<std::streamsize>(config_json.size()));
    if (!os) throw std::runtime_error("checkpoint: write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("checkpoint: cannot open: " + path.string());

    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("checkpoint: bad magic in " + path.string());
    if (read_pod<std::uint32_t>(is) != kVersion)
        throw std::runtime_error("checkpoint: unsupported version in " + path.string());

    Checkpoint ckpt;
    ckpt.net.in_channels = static_cast<int>(read_pod<std::uint32_t>(is));
    const auto n_layers = read_pod<std::uint32_t>(is);
    if (n_layers != ckpt.net.layers.size())
        throw std::runtime_error("checkpoint: unexpected layer count in " + path.string());

    for (auto& layer : ckpt.net.layers) {
        layer.out_c = static_cast<int>(read_pod<std::uint32_t>(is));
        layer.in_c = static_cast<int>(read_pod<std::uint32_t>(is));
        const auto kh = read_pod<std::uint32_t>(is);
        const auto kw = read_pod<std::uint32_t>(is);
        if (kh != 3 || kw != 3)
            throw std::runtime_error("checkpoint: unexpected kernel shape in " + path.string());
        layer.weight = Tensor<float>({layer.out_c, layer.in_c, 3, 3});
        layer.bias = Tensor<float>({layer.out_c});
        is.read(reinterpret_cast<char*>(layer.weight.data.data()),
                static_cast<std::streamsize>(layer.weight.data.size() * sizeof(float)));
        is.read(reinterpret_cast<char*>(layer.bias.data.data()),
                static_cast<std::streamsize>(layer.bias.data.size() * sizeof(float)));
        if (!is) throw std::runtime_error("checkpoint: truncated parameters in " + path.string());
    }

    const auto json_len = read_pod<std::uint64_t>(is);
    ckpt.config_json.resize(json_len);
    is.read(ckpt.config_json.data(), static_cast<std::streamsize>(json_len));
    if (!is) throw std::runtime_error("checkpoint: truncated config in " + path.string());
    return ckpt;
}

} // namespace rvms
