#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "density/common/error.hpp"
#include "density/common/jsonio.hpp"
#include "density/common/rng.hpp"
#include "density/evalkit/kappa.hpp"
#include "density/evalkit/metrics.hpp"
#include "density/evalkit/readers.hpp"
#include "density/evalkit/roc.hpp"
#include "testutil.hpp"

using namespace density;
using namespace density::evalkit;

namespace {

// Independent O(n^2) oracle: Mann-Whitney pair counting with half-credit ties.
double pair_count_auc(const std::vector<double>& scores, const std::vector<int>& truths) {
    double wins = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!truths[i]) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (truths[j]) continue;
            ++pairs;
            if (scores[i] > scores[j]) wins += 1.0;
            else if (scores[i] == scores[j]) wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

std::vector<ProbVector> random_probs(std::size_t n, Rng& rng) {
    std::vector<ProbVector> probs(n);
    for (auto& p : probs) {
        p.resize(4);
        double total = 0.0;
        for (double& v : p) {
            v = rng.uniform(0.01, 1.0);
            total += v;
        }
        for (double& v : p) v /= total;
    }
    return probs;
}

}  // namespace

TEST_CASE("AUC matches the hand-counted example") {
    RocCurve curve = roc_and_auc({0.1, 0.4, 0.35, 0.8}, {0, 0, 1, 1});
    CHECK(curve.auc == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("AUC endpoints: separation gives 1, constant scores give one half") {
    CHECK(roc_and_auc({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}).auc == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(roc_and_auc({0.5, 0.5, 0.5, 0.5}, {1, 0, 1, 0}).auc == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("trapezoidal AUC equals Mann-Whitney pair counting on random instances") {
    Rng rng(314159);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = rng.uniform_int(2, 120);
        std::vector<double> scores(n);
        std::vector<int> truths(n);
        bool has_pos = false, has_neg = false;
        for (int i = 0; i < n; ++i) {
            // Coarse grid so ties actually occur.
            scores[i] = rng.uniform_int(0, 9) / 9.0;
            truths[i] = rng.uniform() < 0.4 ? 1 : 0;
            has_pos |= truths[i] == 1;
            has_neg |= truths[i] == 0;
        }
        if (!has_pos) truths[0] = 1;
        if (!has_neg) truths[n > 1 ? 1 : 0] = 0;
        if (n == 1) continue;

        const double trapezoid = roc_and_auc(scores, truths).auc;
        CHECK(std::abs(trapezoid - pair_count_auc(scores, truths)) < 1e-12);
    }
}

TEST_CASE("ROC sweep is anchored and monotone") {
    Rng rng(21);
    std::vector<double> scores(50);
    std::vector<int> truths(50);
    for (int i = 0; i < 50; ++i) {
        scores[i] = rng.uniform_int(0, 4) / 4.0;
        truths[i] = i % 3 == 0 ? 1 : 0;
    }
    RocCurve curve = roc_and_auc(scores, truths);
    CHECK(curve.points.front().fpr == 0.0);
    CHECK(curve.points.front().tpr == 0.0);
    CHECK(std::isinf(curve.points.front().threshold));
    CHECK(curve.points.back().fpr == 1.0);
    CHECK(curve.points.back().tpr == 1.0);
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        CHECK(curve.points[i].fpr >= curve.points[i - 1].fpr);
        CHECK(curve.points[i].tpr >= curve.points[i - 1].tpr);
        CHECK(curve.points[i].threshold < curve.points[i - 1].threshold);
    }
}

TEST_CASE("single-class truths make AUC undefined") {
    CHECK_THROWS_AS(roc_and_auc({0.1, 0.2}, {1, 1}), Error);
    try {
        roc_and_auc({0.1, 0.2}, {0, 0});
        FAIL("expected degenerate error");
    } catch (const Error& e) {
        CHECK(e.category() == ErrorCategory::Degenerate);
    }
}

TEST_CASE("macAUC of one-hot perfect predictions is 1, of uniform predictions 0.5") {
    std::vector<int> truths = {0, 1, 2, 3, 2, 1};
    std::vector<ProbVector> perfect;
    std::vector<ProbVector> uniform;
    for (int t : truths) {
        ProbVector p(4, 0.0);
        p[t] = 1.0;
        perfect.push_back(p);
        uniform.push_back(ProbVector(4, 0.25));
    }
    MacAuc on_perfect = mac_auc(perfect, truths);
    CHECK(on_perfect.macro == doctest::Approx(1.0).epsilon(1e-15));
    for (double a : on_perfect.per_class) CHECK(a == doctest::Approx(1.0).epsilon(1e-15));

    MacAuc on_uniform = mac_auc(uniform, truths);
    CHECK(on_uniform.macro == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("macAUC per-class values match the pair-counting oracle and the macro is their mean") {
    Rng rng(777);
    std::vector<int> truths(200);
    for (auto& t : truths) t = rng.uniform_int(0, 3);
    for (int c = 0; c < 4; ++c) truths[c] = c;  // every class present
    const auto probs = random_probs(200, rng);

    MacAuc result = mac_auc(probs, truths);
    double mean = 0.0;
    for (int c = 0; c < 4; ++c) {
        std::vector<double> scores;
        std::vector<int> binary;
        for (std::size_t i = 0; i < truths.size(); ++i) {
            scores.push_back(probs[i][c]);
            binary.push_back(truths[i] == c ? 1 : 0);
        }
        CHECK(std::abs(result.per_class[c] - pair_count_auc(scores, binary)) < 1e-12);
        mean += result.per_class[c];
    }
    CHECK(result.macro == doctest::Approx(mean / 4.0).epsilon(1e-15));
}

TEST_CASE("macAUC names the missing class") {
    Rng rng(1);
    std::vector<int> truths = {0, 1, 2, 0};  // class 3 absent
    CHECK_THROWS_WITH_AS(mac_auc(random_probs(4, rng), truths), doctest::Contains("class 3"), Error);
}

TEST_CASE("top-k accuracy follows the ranked classes") {
    std::vector<ProbVector> probs = {{0.1, 0.5, 0.3, 0.1}};
    CHECK(top_k_accuracy(probs, {2}, 2) == 1.0);   // top-2 = {1, 2}
    CHECK(top_k_accuracy(probs, {2}, 1) == 0.0);
    CHECK(top_k_accuracy(probs, {3}, 4) == 1.0);   // k = 4 always correct
    CHECK_THROWS_AS(top_k_accuracy({}, {}, 1), Error);
    CHECK_THROWS_AS(top_k_accuracy(probs, {2}, 5), Error);
}

TEST_CASE("top-k is non-decreasing in k and exactly 1 at k = 4") {
    Rng rng(31);
    const auto probs = random_probs(300, rng);
    std::vector<int> truths(300);
    for (auto& t : truths) t = rng.uniform_int(0, 3);
    double previous = 0.0;
    for (int k = 1; k <= 4; ++k) {
        const double acc = top_k_accuracy(probs, truths, k);
        CHECK(acc >= previous);
        previous = acc;
    }
    CHECK(top_k_accuracy(probs, truths, 4) == 1.0);
}

TEST_CASE("probability ties in top-k prefer the lower class index") {
    std::vector<ProbVector> probs = {{0.4, 0.4, 0.1, 0.1}};
    CHECK(top_k_accuracy(probs, {0}, 1) == 1.0);  // tie at 0.4 resolved to class 0
    CHECK(top_k_accuracy(probs, {1}, 1) == 0.0);
}

TEST_CASE("superclass accuracy coarsens the argmax") {
    std::vector<ProbVector> dense_pred = {{0.0, 0.1, 0.2, 0.7}};
    CHECK(superclass_accuracy(dense_pred, {2}) == 1.0);  // 3 and 2 are both dense
    std::vector<ProbVector> scattered_pred = {{0.1, 0.7, 0.2, 0.0}};
    CHECK(superclass_accuracy(scattered_pred, {2}) == 0.0);
}

TEST_CASE("superclass accuracy dominates top-1 on random data") {
    Rng rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const auto probs = random_probs(100, rng);
        std::vector<int> truths(100);
        for (auto& t : truths) t = rng.uniform_int(0, 3);
        CHECK(superclass_accuracy(probs, truths) >= top_k_accuracy(probs, truths, 1));
    }
}

TEST_CASE("confusion matrix trace equals top-1 count and rows equal class counts") {
    Rng rng(44);
    const auto probs = random_probs(150, rng);
    std::vector<int> truths(150);
    for (auto& t : truths) t = rng.uniform_int(0, 3);

    const auto matrix = confusion_matrix(probs, truths);
    int trace = 0;
    std::array<int, 4> row_sums{};
    for (int r = 0; r < 4; ++r) {
        trace += matrix[r][r];
        for (int c = 0; c < 4; ++c) row_sums[r] += matrix[r][c];
    }
    CHECK(static_cast<double>(trace) / 150.0 ==
          doctest::Approx(top_k_accuracy(probs, truths, 1)).epsilon(1e-15));
    for (int r = 0; r < 4; ++r) {
        int count = 0;
        for (int t : truths) count += t == r ? 1 : 0;
        CHECK(row_sums[r] == count);
    }
}

TEST_CASE("eval report is internally consistent and JSON round-trips") {
    Rng rng(99);
    const auto probs = random_probs(120, rng);
    std::vector<int> truths(120);
    for (auto& t : truths) t = rng.uniform_int(0, 3);
    for (int c = 0; c < 4; ++c) truths[c] = c;

    EvalReport report = evaluate(probs, truths);
    CHECK(report.top1 <= report.top2);
    CHECK(report.top2 <= report.top3);
    CHECK(report.mac_auc ==
          doctest::Approx((report.auc_per_class[0] + report.auc_per_class[1] + report.auc_per_class[2] +
                           report.auc_per_class[3]) /
                          4.0)
              .epsilon(1e-15));

    testutil::TempDir tmp("report");
    write_json_file(tmp.path() / "report.json", eval_report_to_json(report));
    EvalReport loaded = eval_report_from_json(read_json_file(tmp.path() / "report.json"));
    CHECK(loaded.confusion == report.confusion);
    CHECK(loaded.top1 == doctest::Approx(report.top1).epsilon(1e-6));
}

TEST_CASE("kappa of identical vectors is exactly 1") {
    CHECK(cohen_kappa({0, 1, 2, 3, 1}, {0, 1, 2, 3, 1}, 4) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("kappa hand fixture evaluates to exactly one half") {
    CHECK(cohen_kappa({0, 0, 1, 1}, {0, 0, 1, 0}, 2) == 0.5);
}

TEST_CASE("kappa of independent uniform raters is near zero") {
    Rng rng(606);
    std::vector<int> a(10000), b(10000);
    for (auto& v : a) v = rng.uniform_int(0, 3);
    for (auto& v : b) v = rng.uniform_int(0, 3);
    CHECK(std::abs(cohen_kappa(a, b, 4)) < 0.05);
}

TEST_CASE("kappa is invariant under a shared relabeling permutation") {
    Rng rng(11);
    std::vector<int> a(500), b(500);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = rng.uniform_int(0, 3);
        b[i] = rng.uniform() < 0.7 ? a[i] : rng.uniform_int(0, 3);
    }
    const double base = cohen_kappa(a, b, 4);
    const std::array<int, 4> perm = {2, 0, 3, 1};
    std::vector<int> ap(a.size()), bp(b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        ap[i] = perm[a[i]];
        bp[i] = perm[b[i]];
    }
    CHECK(cohen_kappa(ap, bp, 4) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("degenerate agreement is an error, not a value") {
    try {
        cohen_kappa({1, 1, 1}, {1, 1, 1}, 4);
        FAIL("expected degenerate error");
    } catch (const Error& e) {
        CHECK(e.category() == ErrorCategory::Degenerate);
    }
    // Two constant raters on different classes are defined (kappa 0).
    CHECK(cohen_kappa({0, 0}, {1, 1}, 4) == 0.0);
}

TEST_CASE("collapse_superclass maps pairs and preserves perfect agreement") {
    CHECK(collapse_superclass(std::vector<int>{0, 1, 2, 3}) == std::vector<int>{0, 0, 1, 1});
    CHECK_THROWS_AS(collapse_superclass(std::vector<int>{4}), Error);

    std::vector<int> labels = {0, 1, 2, 3, 2, 0};
    CHECK(cohen_kappa(collapse_superclass(labels), collapse_superclass(labels), 2) == 1.0);
}

TEST_CASE("within-superclass confusion raises the collapsed kappa") {
    // Rater b only ever confuses 0<->1 and 2<->3.
    Rng rng(5150);
    std::vector<int> a(400), b(400);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = rng.uniform_int(0, 3);
        if (rng.uniform() < 0.4) {
            b[i] = a[i] ^ 1;  // partner class within the same superclass
        } else {
            b[i] = a[i];
        }
    }
    const double four_class = cohen_kappa(a, b, 4);
    const double two_class = cohen_kappa(collapse_superclass(a), collapse_superclass(b), 2);
    CHECK(two_class > four_class);
    CHECK(two_class == 1.0);
}

TEST_CASE("kappa matrix is symmetric and consistent with scalar calls") {
    Rng rng(9);
    std::vector<std::pair<std::string, std::vector<int>>> raters(3);
    raters[0].first = "L";
    raters[1].first = "N";
    raters[2].first = "H";
    for (auto& [name, labels] : raters) {
        labels.resize(100);
        for (auto& v : labels) v = rng.uniform_int(0, 3);
    }
    raters[1].second = raters[0].second;  // N == L

    KappaMatrix matrix = kappa_matrix(raters, 4);
    CHECK(matrix.raters == std::vector<std::string>{"L", "N", "H"});
    CHECK(matrix.cells[0][1] == doctest::Approx(1.0));
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(matrix.cells[i][i] == doctest::Approx(1.0));
        for (std::size_t j = i + 1; j < 3; ++j) {
            REQUIRE(matrix.cells[i][j].has_value());
            CHECK(*matrix.cells[i][j] == *matrix.cells[j][i]);
            CHECK(*matrix.cells[i][j] ==
                  doctest::Approx(cohen_kappa(raters[i].second, raters[j].second, 4)).epsilon(1e-12));
        }
    }

    Json doc = kappa_matrix_to_json(matrix);
    CHECK(doc.at("raters").size() == 3);
    CHECK(doc.at("kappa").size() == 3);
}

TEST_CASE("degenerate pairs land in the kappa matrix error list") {
    std::vector<std::pair<std::string, std::vector<int>>> raters = {
        {"A", {1, 1, 1}},
        {"B", {1, 1, 1}},
        {"C", {0, 1, 2}},
    };
    KappaMatrix matrix = kappa_matrix(raters, 4);
    CHECK_FALSE(matrix.cells[0][1].has_value());
    REQUIRE(matrix.errors.size() == 1);
    CHECK(matrix.errors[0].rater_a == "A");
    CHECK(matrix.errors[0].rater_b == "B");
}

TEST_CASE("one-hot averaging counts top choices") {
    ReaderRanking r1{"S", "E1", {2, 1, 0, 3}};
    ReaderRanking r2{"R", "E1", {2, 3, 1, 0}};
    ReaderRanking r3{"A", "E1", {2, 0, 1, 3}};
    auto unanimous = average_one_hot({r1, r2, r3});
    CHECK(unanimous == std::array<double, 4>{0, 0, 1, 0});

    ReaderRanking s1{"S", "E2", {1, 0, 2, 3}};
    ReaderRanking s2{"R", "E2", {1, 2, 0, 3}};
    ReaderRanking s3{"A", "E2", {2, 1, 0, 3}};
    auto split_vote = average_one_hot({s1, s2, s3});
    CHECK(split_vote[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(split_vote[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(split_vote[0] == 0.0);
    CHECK(split_vote[3] == 0.0);
}

TEST_CASE("invalid permutations are rejected") {
    ReaderRanking bad{"S", "E1", {2, 2, 0, 3}};
    CHECK_THROWS_AS(validate_ranking(bad), Error);
    CHECK_THROWS_AS(average_one_hot({bad}), Error);
}

TEST_CASE("rankings CSV round-trips losslessly") {
    testutil::TempDir tmp("rankings");
    std::vector<ReaderRanking> rankings = {
        {"S", "E0001", {0, 1, 2, 3}},
        {"R", "E0001", {1, 0, 3, 2}},
        {"A", "E0002", {3, 2, 1, 0}},
    };
    const auto path = tmp.path() / "rankings.csv";
    write_rankings_csv(rankings, path);
    auto loaded = read_rankings_csv(path);
    REQUIRE(loaded.size() == 3);
    CHECK(loaded[1].reader_id == "R");
    CHECK(loaded[1].ranking == std::array<int, 4>{1, 0, 3, 2});

    const auto path2 = tmp.path() / "rankings2.csv";
    write_rankings_csv(loaded, path2);
    CHECK(read_text_file(path) == read_text_file(path2));
}

TEST_CASE("ROC CSV round-trips losslessly and keeps the auc line") {
    testutil::TempDir tmp("roccsv");
    Rng rng(2);
    std::vector<double> scores(60);
    std::vector<int> truths(60);
    for (int i = 0; i < 60; ++i) {
        scores[i] = rng.uniform();
        truths[i] = i % 2;
    }
    RocCurve curve = roc_and_auc(scores, truths);
    const auto path = tmp.path() / "roc.csv";
    write_roc_csv(curve, path);
    RocCurve loaded = read_roc_csv(path);
    REQUIRE(loaded.points.size() == curve.points.size());
    CHECK(loaded.auc == round6(curve.auc));

    const auto path2 = tmp.path() / "roc2.csv";
    write_roc_csv(loaded, path2);
    CHECK(read_text_file(path) == read_text_file(path2));
}
