#include "density/corpus/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "density/common/error.hpp"
#include "density/common/jsonio.hpp"

namespace density::corpus {

namespace {

std::string to_lower(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

Manifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCategory::Io, "cannot open manifest: " + path.string());

    Manifest manifest;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        Json record;
        try {
            record = Json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(ErrorCategory::Io,
                        "manifest line " + std::to_string(line_no) + " is not valid JSON: " + e.what());
        }
        ExamRecord exam;
        try {
            exam.exam_id = record.at("exam_id").get<std::string>();
            exam.patient_id = record.at("patient_id").get<std::string>();
            exam.date = record.at("date").get<std::string>();
            const Json& views = record.at("views");
            for (ViewKind kind : kViewOrder) {
                const std::string key(view_name(kind));
                if (!views.contains(key)) {
                    throw Error(ErrorCategory::Data,
                                "exam " + exam.exam_id + " is missing view " + key);
                }
                exam.view_paths[static_cast<int>(kind)] = views.at(key).get<std::string>();
            }
            exam.report = record.at("report").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCategory::Io,
                        "manifest line " + std::to_string(line_no) + " is malformed: " + e.what());
        }
        if (!seen_ids.insert(exam.exam_id).second) {
            throw Error(ErrorCategory::Data, "duplicate exam id in manifest: " + exam.exam_id);
        }
        manifest.records.push_back(std::move(exam));
    }
    return manifest;
}

void save_manifest(const Manifest& manifest, const std::filesystem::path& path) {
    std::ostringstream out;
    for (const auto& exam : manifest.records) {
        Json record;
        record["exam_id"] = exam.exam_id;
        record["patient_id"] = exam.patient_id;
        record["date"] = exam.date;
        Json views;
        for (ViewKind kind : kViewOrder) {
            views[std::string(view_name(kind))] = exam.view_paths[static_cast<int>(kind)];
        }
        record["views"] = std::move(views);
        record["report"] = exam.report;
        out << record.dump() << "\n";
    }
    write_text_file(path, out.str());
}

std::optional<int> parse_report(const std::string& text) {
    const std::string lower = to_lower(text);
    std::optional<int> found;
    for (int c = 0; c < kDensityClasses; ++c) {
        if (lower.find(density_phrases()[c]) == std::string::npos) continue;
        if (found && *found != c) {
            throw AmbiguousDensityError(*found, c,
                                        "report contains conflicting density phrases for classes " +
                                            std::to_string(*found) + " and " + std::to_string(c));
        }
        found = c;
    }
    return found;
}

void extract_labels(Manifest& manifest) {
    for (auto& exam : manifest.records) {
        exam.density = parse_report(exam.report);
    }
}

std::pair<Manifest, int> apply_exclusion(const Manifest& manifest) {
    Manifest retained;
    int excluded = 0;
    for (const auto& exam : manifest.records) {
        ExamRecord copy = exam;
        if (!copy.density) copy.density = parse_report(copy.report);
        if (copy.density) {
            retained.records.push_back(std::move(copy));
        } else {
            ++excluded;
        }
    }
    return {std::move(retained), excluded};
}

void load_ground_truth(Manifest& manifest, const std::filesystem::path& path, bool overwrite_density) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCategory::Io, "cannot open ground truth: " + path.string());

    std::unordered_map<std::string, std::pair<int, int>> truth;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        Json record = Json::parse(line);
        truth[record.at("exam_id").get<std::string>()] = {record.at("density").get<int>(),
                                                          record.at("birads").get<int>()};
    }
    for (auto& exam : manifest.records) {
        auto it = truth.find(exam.exam_id);
        if (it == truth.end()) continue;
        if (overwrite_density || !exam.density) exam.density = it->second.first;
        exam.birads = it->second.second;
    }
}

void save_ground_truth(const std::vector<std::pair<std::string, std::pair<int, int>>>& truth,
                       const std::filesystem::path& path) {
    std::ostringstream out;
    for (const auto& [exam_id, labels] : truth) {
        Json record;
        record["exam_id"] = exam_id;
        record["density"] = labels.first;
        record["birads"] = labels.second;
        out << record.dump() << "\n";
    }
    write_text_file(path, out.str());
}

}  // namespace density::corpus
