#include "density/corpus/pgm.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <string>

#include "density/common/error.hpp"

namespace density::corpus {

namespace {

[[noreturn]] void parse_fail(const std::filesystem::path& path, const std::string& what) {
    throw Error(ErrorCategory::Io, what + ": " + path.string());
}

// Next header token, skipping whitespace and '#' comments.
bool next_token(const std::string& data, std::size_t& pos, std::string& token) {
    while (pos < data.size()) {
        char c = data[pos];
        if (c == '#') {
            while (pos < data.size() && data[pos] != '\n') ++pos;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++pos;
        } else {
            break;
        }
    }
    token.clear();
    while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos])) && data[pos] != '#') {
        token.push_back(data[pos++]);
    }
    return !token.empty();
}

long parse_positive(const std::string& token) {
    for (char c : token) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return -1;
    }
    if (token.empty() || token.size() > 9) return -1;
    return std::stol(token);
}

}  // namespace

void save_view(const ViewImage& image, const std::filesystem::path& path) {
    if (image.width <= 0 || image.height <= 0 ||
        image.pixels.size() != static_cast<std::size_t>(image.width) * image.height) {
        throw Error(ErrorCategory::Data, "view image has inconsistent dimensions");
    }
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCategory::Io, "cannot write image: " + path.string());
    out << "P5\n" << image.width << " " << image.height << "\n" << 65535 << "\n";
    std::string payload;
    payload.reserve(image.pixels.size() * 2);
    for (std::uint16_t p : image.pixels) {
        payload.push_back(static_cast<char>(p >> 8));  // big-endian per the PGM standard
        payload.push_back(static_cast<char>(p & 0xff));
    }
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) throw Error(ErrorCategory::Io, "write failed: " + path.string());
}

ViewImage load_view(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) parse_fail(path, "cannot open image");
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    std::size_t pos = 0;
    std::string token;
    if (!next_token(data, pos, token) || token != "P5") parse_fail(path, "malformed header: not a P5 file");

    long dims[3];
    for (long& d : dims) {
        if (!next_token(data, pos, token)) parse_fail(path, "malformed header: missing dimension");
        d = parse_positive(token);
        if (d <= 0) parse_fail(path, "malformed header: bad value '" + token + "'");
    }
    if (dims[2] != 65535) {
        parse_fail(path, "unsupported maxval " + std::to_string(dims[2]) + " (expected 65535)");
    }
    if (pos >= data.size()) parse_fail(path, "unexpected end of data");
    ++pos;  // single whitespace separator before the payload

    ViewImage image;
    image.width = static_cast<int>(dims[0]);
    image.height = static_cast<int>(dims[1]);
    const std::size_t count = static_cast<std::size_t>(image.width) * image.height;
    if (data.size() - pos < count * 2) parse_fail(path, "unexpected end of data");
    image.pixels.resize(count);
    const auto* bytes = reinterpret_cast<const unsigned char*>(data.data()) + pos;
    for (std::size_t i = 0; i < count; ++i) {
        image.pixels[i] = static_cast<std::uint16_t>((bytes[2 * i] << 8) | bytes[2 * i + 1]);
    }
    return image;
}

}  // namespace density::corpus
