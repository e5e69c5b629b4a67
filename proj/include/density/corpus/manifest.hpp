#pragma once

#include <filesystem>
#include <optional>
#include <utility>

#include "density/corpus/types.hpp"

namespace density::corpus {

// Manifest JSONL: one exam object per line with keys exam_id, patient_id,
// date, views (view name -> relative path), report.
Manifest load_manifest(const std::filesystem::path& path);
void save_manifest(const Manifest& manifest, const std::filesystem::path& path);

// Case-insensitive search for the four canonical density phrases.
// Returns nullopt when no phrase is present; throws AmbiguousDensityError
// when two different phrases are found.
std::optional<int> parse_report(const std::string& text);

// Fills the density label cache on every record via parse_report.
void extract_labels(Manifest& manifest);

// Drops exams whose report carries no density phrase. Labels are extracted
// first if the cache is empty. Returns the retained manifest and the count
// of excluded exams.
std::pair<Manifest, int> apply_exclusion(const Manifest& manifest);

// Ground-truth sidecar JSONL ({exam_id, density, birads} per line), written
// by the generator; fills the birads (and optionally density) cache.
void load_ground_truth(Manifest& manifest, const std::filesystem::path& path, bool overwrite_density = false);
void save_ground_truth(const std::vector<std::pair<std::string, std::pair<int, int>>>& truth,
                       const std::filesystem::path& path);

}  // namespace density::corpus
