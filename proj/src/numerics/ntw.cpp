#include "density/numerics/ntw.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "density/common/error.hpp"
#include "density/common/jsonio.hpp"

namespace density::numerics {

namespace {

constexpr char kMagic[8] = {'N', 'T', 'W', 'E', 'I', 'G', 'H', 'T'};

void put_u32_le(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64_le(std::string& out, double d) {
    const auto bits = std::bit_cast<std::uint64_t>(d);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

double get_f64_le(const unsigned char* p) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}

}  // namespace

void save_ntw(const std::filesystem::path& path, const ParamSet& params) {
    Json header = Json::array();
    std::string payload;
    for (const auto& name : params.names()) {
        const Tensor& t = params.at(name);
        Json entry;
        entry["name"] = name;
        entry["shape"] = t.shape();
        entry["byte_offset"] = payload.size();
        header.push_back(std::move(entry));
        payload.reserve(payload.size() + t.size() * 8);
        for (double v : t.values()) put_f64_le(payload, v);
    }

    const std::string header_text = header.dump();
    std::string blob;
    blob.append(kMagic, sizeof(kMagic));
    put_u32_le(blob, static_cast<std::uint32_t>(header_text.size()));
    blob += header_text;
    blob += payload;
    write_text_file(path, blob);
}

ParamSet load_ntw(const std::filesystem::path& path) {
    const std::string blob = read_text_file(path);
    if (blob.size() < sizeof(kMagic) + 4 || std::memcmp(blob.data(), kMagic, sizeof(kMagic)) != 0) {
        throw Error(ErrorCategory::Io, "not an NTW weight container: " + path.string());
    }
    std::uint32_t header_len = 0;
    for (int i = 0; i < 4; ++i) {
        header_len |= static_cast<std::uint32_t>(static_cast<unsigned char>(blob[sizeof(kMagic) + i])) << (8 * i);
    }
    const std::size_t header_start = sizeof(kMagic) + 4;
    if (blob.size() < header_start + header_len) {
        throw Error(ErrorCategory::Io, "truncated NTW header: " + path.string());
    }

    Json header;
    try {
        header = Json::parse(blob.substr(header_start, header_len));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCategory::Io, "invalid NTW header in " + path.string() + ": " + e.what());
    }
    const std::size_t payload_start = header_start + header_len;
    const auto* payload = reinterpret_cast<const unsigned char*>(blob.data()) + payload_start;
    const std::size_t payload_size = blob.size() - payload_start;

    ParamSet params;
    for (const auto& entry : header) {
        const std::string name = entry.at("name").get<std::string>();
        const std::vector<int> shape = entry.at("shape").get<std::vector<int>>();
        const std::size_t offset = entry.at("byte_offset").get<std::size_t>();
        const std::size_t count = shape_product(shape);
        if (offset + count * 8 > payload_size) {
            throw Error(ErrorCategory::Io, "truncated NTW payload for tensor " + name + " in " + path.string());
        }
        std::vector<double> values(count);
        for (std::size_t i = 0; i < count; ++i) values[i] = get_f64_le(payload + offset + i * 8);
        params.add(name, Tensor(shape, std::move(values)));
    }
    return params;
}

}  // namespace density::numerics
