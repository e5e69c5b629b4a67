#include "density/synthgen/corpus_gen.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "density/common/error.hpp"
#include "density/corpus/manifest.hpp"
#include "density/corpus/pgm.hpp"
#include "density/synthgen/report.hpp"

namespace density::synthgen {

namespace {

// Civil-from-days (Howard Hinnant's algorithm); day 0 = 1970-01-01.
std::string iso_date_from_day(int z) {
    z += 719468;
    const int era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int y = static_cast<int>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;

    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", y + (m <= 2 ? 1 : 0), m, d);
    return buf;
}

constexpr int kFirstDay = 12784;  // 2005-01-01
constexpr int kLastDay = 18261;   // 2019-12-31

int sample_categorical(const double* probs, int n, Rng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        acc += probs[i];
        if (u < acc) return i;
    }
    return n - 1;
}

}  // namespace

CorpusPlan plan_corpus(const PhantomConfig& config, const GenerateOptions& options) {
    config.validate();
    if (options.n_patients < 1) {
        throw Error(ErrorCategory::Config, "corpus needs at least one patient");
    }
    if (options.exams_per_patient_min < 1 || options.exams_per_patient_max < options.exams_per_patient_min) {
        throw Error(ErrorCategory::Config, "invalid exams-per-patient range");
    }
    if (options.missing_density_fraction < 0.0 || options.missing_density_fraction > 1.0) {
        throw Error(ErrorCategory::Config, "missing-density fraction must be in [0, 1]");
    }

    Rng rng(derive_seed(config.master_seed, 0xC0'4F'05, 1));
    CorpusPlan plan;
    std::uint64_t exam_seq = 0;

    for (int p = 0; p < options.n_patients; ++p) {
        char pid[16];
        std::snprintf(pid, sizeof(pid), "P%06d", p + 1);

        const int exam_count = rng.uniform_int(options.exams_per_patient_min, options.exams_per_patient_max);
        std::set<int> days;
        while (static_cast<int>(days.size()) < exam_count) {
            days.insert(rng.uniform_int(kFirstDay, kLastDay));
        }

        for (int day : days) {  // ascending, hence strictly increasing dates
            ExamPlan exam;
            exam.patient_id = pid;
            exam.exam_seq = exam_seq++;
            char eid[16];
            std::snprintf(eid, sizeof(eid), "E%07llu", static_cast<unsigned long long>(exam.exam_seq + 1));
            exam.exam_id = eid;
            exam.date = iso_date_from_day(day);
            exam.density = sample_categorical(config.class_marginals.data(), 4, rng);
            exam.birads = sample_categorical(config.birads_given_density[exam.density].data(), 3, rng);
            exam.missing_density_phrase = rng.uniform() < options.missing_density_fraction;
            exam.report = compose_report(
                exam.missing_density_phrase ? std::nullopt : std::optional<int>(exam.density), rng);
            plan.exams.push_back(std::move(exam));
        }
    }
    return plan;
}

corpus::ViewImage render_exam_view(const ExamPlan& plan, corpus::ViewKind view, const PhantomConfig& config) {
    Rng rng(derive_seed(config.master_seed, plan.exam_seq + 1, static_cast<std::uint64_t>(view) + 1));
    return render_view(plan.density, view, config, rng);
}

SyntheticExam realize_exam(const ExamPlan& plan, const PhantomConfig& config) {
    SyntheticExam exam;
    exam.meta = plan;
    for (corpus::ViewKind view : corpus::kViewOrder) {
        exam.views[static_cast<int>(view)] = render_exam_view(plan, view, config);
    }
    return exam;
}

std::vector<SyntheticExam> generate_corpus(const PhantomConfig& config, const GenerateOptions& options) {
    const CorpusPlan plan = plan_corpus(config, options);
    std::vector<SyntheticExam> exams;
    exams.reserve(plan.exams.size());
    for (const auto& p : plan.exams) exams.push_back(realize_exam(p, config));
    return exams;
}

corpus::Manifest write_corpus(const PhantomConfig& config, const GenerateOptions& options,
                              const std::filesystem::path& out_dir) {
    const CorpusPlan plan = plan_corpus(config, options);
    std::filesystem::create_directories(out_dir / "images");

    corpus::Manifest manifest;
    std::vector<std::pair<std::string, std::pair<int, int>>> truth;
    manifest.records.reserve(plan.exams.size());
    truth.reserve(plan.exams.size());

    for (const auto& p : plan.exams) {
        corpus::ExamRecord record;
        record.exam_id = p.exam_id;
        record.patient_id = p.patient_id;
        record.date = p.date;
        record.report = p.report;
        for (corpus::ViewKind view : corpus::kViewOrder) {
            const std::string rel =
                "images/" + p.exam_id + "_" + std::string(corpus::view_name(view)) + ".pgm";
            corpus::save_view(render_exam_view(p, view, config), out_dir / rel);
            record.view_paths[static_cast<int>(view)] = rel;
        }
        truth.emplace_back(p.exam_id, std::make_pair(p.density, p.birads));
        manifest.records.push_back(std::move(record));
    }

    corpus::save_manifest(manifest, out_dir / "manifest.jsonl");
    corpus::save_ground_truth(truth, out_dir / "ground_truth.jsonl");
    return manifest;
}

}  // namespace density::synthgen
