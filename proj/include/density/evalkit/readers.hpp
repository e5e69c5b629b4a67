#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace density::evalkit {

// One reader's most-to-least-likely ordering of the four density classes
// for one exam.
struct ReaderRanking {
    std::string reader_id;
    std::string exam_id;
    std::array<int, 4> ranking{};  // ranking[0] = most likely class

    int top_choice() const { return ranking[0]; }
};

void validate_ranking(const ReaderRanking& ranking);

// CSV with header "reader_id,exam_id,rank1,rank2,rank3,rank4".
void write_rankings_csv(const std::vector<ReaderRanking>& rankings, const std::filesystem::path& path);
std::vector<ReaderRanking> read_rankings_csv(const std::filesystem::path& path);

// Mean of the readers' one-hot top choices; entries are multiples of
// 1/readers and sum to 1.
std::array<double, 4> average_one_hot(const std::vector<ReaderRanking>& rankings_for_exam);

}  // namespace density::evalkit
