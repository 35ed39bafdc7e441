#include "fsru/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

namespace fsru {

namespace {

constexpr char kMagic[8] = {'F', 'S', 'R', 'U', 'C', 'K', 'P', 'T'};

void append_u64_le(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t read_u64_le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

void append_f64_le(std::string& out, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof(bits));
    append_u64_le(out, bits);
}

double read_f64_le(const unsigned char* p) {
    const std::uint64_t bits = read_u64_le(p);
    double d;
    std::memcpy(&d, &bits, sizeof(d));
    return d;
}

}  // namespace

void write_file_atomic(const std::string& path, const std::string& contents) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(contents.data(),
                  static_cast<std::streamsize>(contents.size()));
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    fs::rename(tmp, target);
}

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
    nlohmann::json header;
    header["meta"] = checkpoint.meta_json.empty()
                         ? nlohmann::json::object()
                         : nlohmann::json::parse(checkpoint.meta_json);
    header["arrays"] = nlohmann::json::array();
    std::uint64_t offset = 0;
    for (const auto& [name, tensor] : checkpoint.arrays) {
        header["arrays"].push_back({{"name", name},
                                    {"shape", tensor.shape()},
                                    {"offset", offset}});
        offset += tensor.numel() * 8;
    }
    const std::string header_text = header.dump();

    std::string blob;
    blob.reserve(16 + header_text.size() + offset);
    blob.append(kMagic, sizeof(kMagic));
    append_u64_le(blob, header_text.size());
    blob += header_text;
    for (const auto& [name, tensor] : checkpoint.arrays)
        for (double v : tensor.data()) append_f64_le(blob, v);
    write_file_atomic(path, blob);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint " + path);
    std::string blob((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    if (blob.size() < 16 || std::memcmp(blob.data(), kMagic, 8) != 0)
        throw std::runtime_error("not a checkpoint file: " + path);
    const auto* bytes = reinterpret_cast<const unsigned char*>(blob.data());
    const std::uint64_t header_len = read_u64_le(bytes + 8);
    if (16 + header_len > blob.size())
        throw std::runtime_error("truncated checkpoint header: " + path);
    const nlohmann::json header =
        nlohmann::json::parse(blob.substr(16, header_len));
    const std::size_t payload_start = 16 + header_len;

    Checkpoint out;
    out.meta_json = header.value("meta", nlohmann::json::object()).dump();
    for (const auto& entry : header.at("arrays")) {
        const std::string name = entry.at("name").get<std::string>();
        const std::vector<int> shape =
            entry.at("shape").get<std::vector<int>>();
        const std::uint64_t offset = entry.at("offset").get<std::uint64_t>();
        const std::size_t count = shape_numel(shape);
        if (payload_start + offset + count * 8 > blob.size())
            throw std::runtime_error("truncated checkpoint payload at array " +
                                     name);
        std::vector<double> data(count);
        for (std::size_t i = 0; i < count; ++i)
            data[i] = read_f64_le(bytes + payload_start + offset + i * 8);
        out.arrays.emplace_back(name, Tensor(shape, std::move(data)));
    }
    return out;
}

void load_into(const Checkpoint& checkpoint,
               std::vector<std::pair<std::string, Tensor>> parameters) {
    std::unordered_map<std::string, Tensor> by_name;
    for (auto& [name, tensor] : checkpoint.arrays) by_name.emplace(name, tensor);
    for (auto& [name, param] : parameters) {
        auto it = by_name.find(name);
        if (it == by_name.end())
            throw std::runtime_error("checkpoint is missing array " + name);
        if (it->second.shape() != param.shape())
            throw std::runtime_error(
                "checkpoint shape mismatch for array " + name + ": file has " +
                shape_str(it->second.shape()) + ", model expects " +
                shape_str(param.shape()));
        auto dst = param.mutable_data();
        auto src = it->second.data();
        std::copy(src.begin(), src.end(), dst.begin());
    }
}

}  // namespace fsru
