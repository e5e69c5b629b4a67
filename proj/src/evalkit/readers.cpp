#include "density/evalkit/readers.hpp"

#include <array>
#include <sstream>

#include "density/common/error.hpp"
#include "density/common/jsonio.hpp"

namespace density::evalkit {

void validate_ranking(const ReaderRanking& ranking) {
    std::array<bool, 4> seen{};
    for (int cls : ranking.ranking) {
        if (cls < 0 || cls > 3 || seen[cls]) {
            throw Error(ErrorCategory::Data, "ranking for exam " + ranking.exam_id + " by reader " +
                                                 ranking.reader_id +
                                                 " is not a permutation of the four classes");
        }
        seen[cls] = true;
    }
}

void write_rankings_csv(const std::vector<ReaderRanking>& rankings, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "reader_id,exam_id,rank1,rank2,rank3,rank4\n";
    for (const auto& ranking : rankings) {
        validate_ranking(ranking);
        out << ranking.reader_id << "," << ranking.exam_id;
        for (int cls : ranking.ranking) out << "," << cls;
        out << "\n";
    }
    write_text_file(path, out.str());
}

std::vector<ReaderRanking> read_rankings_csv(const std::filesystem::path& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line) || line != "reader_id,exam_id,rank1,rank2,rank3,rank4") {
        throw Error(ErrorCategory::Io, "bad rankings CSV header in " + path.string());
    }
    std::vector<ReaderRanking> rankings;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            fields.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (fields.size() != 6) {
            throw Error(ErrorCategory::Io,
                        "rankings CSV line " + std::to_string(line_no) + " needs 6 fields: " + path.string());
        }
        ReaderRanking ranking;
        ranking.reader_id = fields[0];
        ranking.exam_id = fields[1];
        for (int i = 0; i < 4; ++i) {
            try {
                ranking.ranking[i] = std::stoi(fields[2 + i]);
            } catch (const std::exception&) {
                throw Error(ErrorCategory::Io, "rankings CSV line " + std::to_string(line_no) +
                                                   " has a bad class index: " + path.string());
            }
        }
        validate_ranking(ranking);
        rankings.push_back(std::move(ranking));
    }
    return rankings;
}

std::array<double, 4> average_one_hot(const std::vector<ReaderRanking>& rankings_for_exam) {
    if (rankings_for_exam.empty()) {
        throw Error(ErrorCategory::Data, "one-hot averaging needs at least one reader");
    }
    std::array<double, 4> scores{};
    for (const auto& ranking : rankings_for_exam) {
        validate_ranking(ranking);
        scores[ranking.top_choice()] += 1.0;
    }
    for (double& s : scores) s /= static_cast<double>(rankings_for_exam.size());
    return scores;
}

}  // namespace density::evalkit
