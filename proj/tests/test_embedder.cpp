#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "oriole/model.hpp"
#include "oriole/ref/reference.hpp"
#include "oriole/rng.hpp"

using namespace oriole;

namespace {

Image random_image(int s, std::uint64_t seed) {
    CounterRng rng(seed);
    std::vector<double> px(static_cast<std::size_t>(s) * s);
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = rng.uniform(i);
    return Image::from_pixels(s, s, std::move(px));
}

double rel_err(double got, double want) {
    return std::abs(got - want) / std::max({std::abs(got), std::abs(want), 1e-6});
}

// tiny separable dataset: per-identity constant ramp plus noise
LabeledDataset toy_dataset(int n_classes, int per_class, std::uint64_t seed) {
    LabeledDataset data;
    CounterRng rng(seed);
    std::uint64_t ctr = 0;
    for (int c = 0; c < n_classes; ++c) {
        for (int i = 0; i < per_class; ++i) {
            std::vector<double> px(32 * 32);
            for (std::size_t p = 0; p < px.size(); ++p) {
                double base = 0.2 + 0.6 * c / std::max(1, n_classes - 1);
                double wave = 0.15 * std::sin(0.3 * (c + 1) * static_cast<double>(p % 32));
                double noise = 0.02 * (rng.uniform(ctr++) - 0.5);
                px[p] = std::clamp(base + wave + noise, 0.0, 1.0);
            }
            data.push_back(Image::from_pixels(32, 32, std::move(px)), c);
        }
    }
    return data;
}

std::vector<char> slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::vector<char>((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("zero image through zero parameters gives zero features") {
    EmbeddingModel m{Architecture{}};
    Image x(32, 32, 0.0);
    for (double v : forward(m, x)) CHECK(v == 0.0);
}

TEST_CASE("forward is pure and deterministic") {
    EmbeddingModel m = EmbeddingModel::seeded(Architecture{}, 42, 1.0);
    Image x = random_image(32, 42);
    auto params_before = m.parameters();
    auto f1 = forward(m, x);
    auto f2 = forward(m, x);
    CHECK(f1 == f2);
    CHECK(m.parameters() == params_before);
    // re-seeding reproduces the exact parameter vector
    EmbeddingModel m2 = EmbeddingModel::seeded(Architecture{}, 42, 1.0);
    CHECK(m2.parameters() == m.parameters());
}

TEST_CASE("forward agrees with the naive reference convolutions") {
    for (int trial = 0; trial < 5; ++trial) {
        EmbeddingModel m = EmbeddingModel::seeded(Architecture{}, 50 + trial, 1.0);
        Image x = random_image(32, 60 + trial);
        auto got = forward(m, x);
        auto want = ref::forward_ref(m, x);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i)
            CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
    }
}

TEST_CASE("forward rejects wrong input shapes") {
    EmbeddingModel m{Architecture{}};
    CHECK_THROWS_AS(forward(m, Image(16, 16, 0.5)), DimensionError);
}

TEST_CASE("input_gradient with zero upstream is zero") {
    EmbeddingModel m = EmbeddingModel::seeded(Architecture{}, 7, 1.0);
    Image x = random_image(32, 8);
    FeatureVector upstream(32, 0.0);
    for (double v : input_gradient(m, x, upstream).delta) CHECK(v == 0.0);
}

TEST_CASE("input_gradient matches central finite differences") {
    CounterRng pick(91);
    for (int trial = 0; trial < 3; ++trial) {
        EmbeddingModel m = EmbeddingModel::seeded(Architecture{}, 100 + trial, 1.0);
        Image x = random_image(32, 200 + trial);
        FeatureVector upstream(32);
        CounterRng urng(300 + trial);
        for (std::size_t i = 0; i < upstream.size(); ++i) upstream[i] = urng.uniform(i, -1.0, 1.0);
        Perturbation g = input_gradient(m, x, upstream);

        auto dot = [&](const Image& img) {
            auto f = forward(m, img);
            double acc = 0.0;
            for (std::size_t i = 0; i < f.size(); ++i) acc += f[i] * upstream[i];
            return acc;
        };
        for (int k = 0; k < 20; ++k) {
            int p = static_cast<int>(pick.below(trial * 20 + k, 1024));
            const double h = 1e-6;
            Image lo = x, hi = x;
            lo.pixels()[static_cast<std::size_t>(p)] -= h;
            hi.pixels()[static_cast<std::size_t>(p)] += h;
            double fd = (dot(hi) - dot(lo)) / (2.0 * h);
            CHECK(rel_err(g.delta[static_cast<std::size_t>(p)], fd) <= 1e-4);
        }
    }
}

TEST_CASE("input_gradient vanishes when every ReLU is dead") {
    Architecture arch;
    EmbeddingModel m = EmbeddingModel::seeded(arch, 5, 1.0);
    // large negative conv1 biases kill every first-layer activation
    for (std::size_t i = 0; i < static_cast<std::size_t>(arch.conv1_maps); ++i)
        m.parameters()[arch.conv1_b_off() + i] = -10.0;
    Image x = random_image(32, 17);
    FeatureVector upstream(32, 1.0);
    for (double v : input_gradient(m, x, upstream).delta) CHECK(v == 0.0);
}

TEST_CASE("classifier parameter gradients match finite differences") {
    LabeledDataset data = toy_dataset(3, 2, 999);
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.seed = 4;
    ClassifierModel m = train_classifier(data, cfg);

    Image x = data.images[1];
    std::vector<double> grad;
    classifier_example_grad(m, x, 1, grad);
    const std::size_t nb = m.backbone.parameters().size();

    CounterRng pick(777);
    const double h = 1e-6;
    for (int k = 0; k < 25; ++k) {
        std::size_t j = pick.below(k, classifier_param_count(m));
        auto poke = [&](double eps) {
            ClassifierModel mm = m;
            if (j < nb)
                mm.backbone.parameters()[j] += eps;
            else if (j < nb + m.head_w.size())
                mm.head_w[j - nb] += eps;
            else
                mm.head_b[j - nb - m.head_w.size()] += eps;
            return classifier_loss(mm, x, 1);
        };
        double fd = (poke(h) - poke(-h)) / (2.0 * h);
        CHECK(rel_err(grad[j], fd) <= 1e-4);
    }
}

TEST_CASE("softmax probabilities are a distribution") {
    LabeledDataset data = toy_dataset(4, 2, 31);
    TrainConfig cfg;
    cfg.epochs = 2;
    ClassifierModel m = train_classifier(data, cfg);
    for (int t = 0; t < 5; ++t) {
        auto p = m.probabilities(random_image(32, 400 + t));
        double sum = 0.0;
        for (double v : p) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
}

TEST_CASE("training on a small separable set reaches 0.95 accuracy") {
    LabeledDataset data = toy_dataset(4, 25, 12345);
    TrainConfig cfg;
    cfg.epochs = 30;
    cfg.seed = 9;
    TrainReport report;
    train_classifier(data, cfg, nullptr, &report);
    CHECK(report.final_loss < report.initial_loss);
    CHECK(report.train_accuracy >= 0.95);
}

TEST_CASE("single-class training degenerates to that class") {
    LabeledDataset data = toy_dataset(1, 8, 5);
    TrainConfig cfg;
    cfg.epochs = 10;
    ClassifierModel m = train_classifier(data, cfg);
    for (int t = 0; t < 5; ++t) {
        auto p = m.probabilities(random_image(32, 500 + t));
        CHECK(p[0] >= 0.99);
        CHECK(m.predict(random_image(32, 500 + t)) == 0);
    }
}

TEST_CASE("training validates its inputs") {
    TrainConfig cfg;
    CHECK_THROWS_AS(train_classifier(LabeledDataset{}, cfg), InputError);
    LabeledDataset bad = toy_dataset(2, 2, 3);
    bad.labels[0] = -4;
    CHECK_THROWS_AS(train_classifier(bad, cfg), InputError);
    TrainConfig zero_epochs;
    zero_epochs.epochs = 0;
    CHECK_THROWS_AS(train_classifier(toy_dataset(2, 2, 3), zero_epochs), InputError);
    CHECK_THROWS_AS(pretrain_feature_extractor(LabeledDataset{}, cfg), InputError);
}

TEST_CASE("training is deterministic given seed, data, and config") {
    LabeledDataset data = toy_dataset(3, 6, 77);
    TrainConfig cfg;
    cfg.epochs = 4;
    cfg.seed = 21;
    ClassifierModel a = train_classifier(data, cfg);
    ClassifierModel b = train_classifier(data, cfg);
    CHECK(a.backbone.parameters() == b.backbone.parameters());
    CHECK(a.head_w == b.head_w);
    CHECK(a.head_b == b.head_b);
}

TEST_CASE("warm-starting from a given backbone begins at those parameters") {
    LabeledDataset data = toy_dataset(2, 3, 55);
    EmbeddingModel init = EmbeddingModel::seeded(Architecture{}, 1234, 1.0);
    TrainConfig cfg;
    cfg.epochs = 1;
    cfg.learning_rate = 1e-12;  // effectively frozen
    ClassifierModel m = train_classifier(data, cfg, &init);
    for (std::size_t i = 0; i < init.parameters().size(); ++i)
        CHECK(m.backbone.parameters()[i] ==
              doctest::Approx(init.parameters()[i]).epsilon(1e-9));
}

TEST_CASE("frozen pretrained features separate held-out identities by nearest centroid") {
    // public pool: 20 identities; held-out: 4 fresh identities
    LabeledDataset pool = toy_dataset(20, 12, 4242);
    TrainConfig cfg;
    cfg.epochs = 12;
    cfg.seed = 3;
    EmbeddingModel phi = pretrain_feature_extractor(pool, cfg);

    LabeledDataset held = toy_dataset(4, 12, 989898);  // different pattern seeds
    // centroid of the first half of each identity, score the second half
    std::vector<FeatureVector> centroids(4, FeatureVector(32, 0.0));
    std::vector<int> counts(4, 0);
    for (std::size_t i = 0; i < held.size(); ++i) {
        if (static_cast<int>(i % 12) >= 6) continue;
        auto f = forward(phi, held.images[i]);
        for (std::size_t j = 0; j < f.size(); ++j) centroids[static_cast<std::size_t>(held.labels[i])][j] += f[j];
        counts[static_cast<std::size_t>(held.labels[i])]++;
    }
    for (int c = 0; c < 4; ++c)
        for (double& v : centroids[static_cast<std::size_t>(c)]) v /= counts[static_cast<std::size_t>(c)];

    int correct = 0, total = 0;
    for (std::size_t i = 0; i < held.size(); ++i) {
        if (static_cast<int>(i % 12) < 6) continue;
        auto f = forward(phi, held.images[i]);
        int best = -1;
        double best_d = 1e300;
        for (int c = 0; c < 4; ++c) {
            double d = 0.0;
            for (std::size_t j = 0; j < f.size(); ++j) {
                double diff = f[j] - centroids[static_cast<std::size_t>(c)][j];
                d += diff * diff;
            }
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        correct += best == held.labels[i] ? 1 : 0;
        ++total;
    }
    CHECK(static_cast<double>(correct) / total >= 0.8);
}

TEST_CASE("model files round-trip bit-exactly with a pinned header") {
    EmbeddingModel m = EmbeddingModel::seeded(Architecture{}, 31337, 1.0);
    auto tmp = std::filesystem::temp_directory_path() / "oriole_test_model.bin";
    save_model(m, tmp.string());
    auto bytes = slurp(tmp);
    REQUIRE(bytes.size() == 16 + m.parameters().size() * 8);
    CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "ORIM");
    EmbeddingModel back = load_model(tmp.string());
    CHECK(back.parameters() == m.parameters());

    // corrupting the magic is rejected
    bytes[0] = 'X';
    std::ofstream f(tmp, std::ios::binary);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    f.close();
    CHECK_THROWS_AS(load_model(tmp.string()), InputError);
    std::filesystem::remove(tmp);
}

TEST_CASE("classifier files round-trip") {
    LabeledDataset data = toy_dataset(3, 3, 808);
    TrainConfig cfg;
    cfg.epochs = 2;
    ClassifierModel m = train_classifier(data, cfg);
    auto tmp = std::filesystem::temp_directory_path() / "oriole_test_classifier.bin";
    save_classifier(m, tmp.string());
    ClassifierModel back = load_classifier(tmp.string());
    CHECK(back.backbone.parameters() == m.backbone.parameters());
    CHECK(back.head_w == m.head_w);
    CHECK(back.head_b == m.head_b);
    CHECK(back.class_labels == m.class_labels);
    std::filesystem::remove(tmp);
}
