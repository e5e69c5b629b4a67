#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

namespace density {

// Insertion-ordered JSON keeps emitted artifacts byte-stable.
using Json = nlohmann::ordered_json;

// Round to 6 significant digits; report files serialize floats through this.
double round6(double x);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& value);

}  // namespace density
