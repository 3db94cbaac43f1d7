#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oriole/dataset.hpp"
#include "oriole/image.hpp"

namespace oriole {

using FeatureVector = std::vector<double>;

/// Fixed feature-projector architecture:
/// S x S x 1 -> 3x3 conv, 8 maps, stride 2, pad 1 -> ReLU
///           -> 3x3 conv, 16 maps, stride 2, pad 1 -> ReLU
///           -> flatten -> affine -> d features.
struct Architecture {
    int input_size = 32;
    int conv1_maps = 8;
    int conv2_maps = 16;
    int kernel = 3;
    int stride = 2;
    int pad = 1;
    int feature_dim = 32;

    int conv1_out() const { return (input_size + 2 * pad - kernel) / stride + 1; }
    int conv2_out() const { return (conv1_out() + 2 * pad - kernel) / stride + 1; }
    int flat_dim() const { return conv2_maps * conv2_out() * conv2_out(); }

    std::size_t conv1_w_count() const {
        return static_cast<std::size_t>(conv1_maps) * kernel * kernel;
    }
    std::size_t conv2_w_count() const {
        return static_cast<std::size_t>(conv2_maps) * conv1_maps * kernel * kernel;
    }
    std::size_t fc_w_count() const {
        return static_cast<std::size_t>(feature_dim) * flat_dim();
    }
    std::size_t param_count() const {
        return conv1_w_count() + conv1_maps + conv2_w_count() + conv2_maps +
               fc_w_count() + feature_dim;
    }

    // flat parameter layout: conv1_w, conv1_b, conv2_w, conv2_b, fc_w, fc_b
    std::size_t conv1_w_off() const { return 0; }
    std::size_t conv1_b_off() const { return conv1_w_count(); }
    std::size_t conv2_w_off() const { return conv1_b_off() + conv1_maps; }
    std::size_t conv2_b_off() const { return conv2_w_off() + conv2_w_count(); }
    std::size_t fc_w_off() const { return conv2_b_off() + conv2_maps; }
    std::size_t fc_b_off() const { return fc_w_off() + fc_w_count(); }

    std::uint64_t hash() const;
    bool operator==(const Architecture&) const = default;
};

/// The feature projector Phi: fixed architecture plus a flat parameter vector.
class EmbeddingModel {
public:
    EmbeddingModel() : EmbeddingModel(Architecture{}) {}
    explicit EmbeddingModel(const Architecture& arch)
        : arch_(arch), params_(arch.param_count(), 0.0) {}

    /// Uniform [-s, +s] per layer with s = init_scale / sqrt(fan_in), drawn
    /// from the counter-based generator.
    static EmbeddingModel seeded(const Architecture& arch, std::uint64_t seed,
                                 double init_scale);

    const Architecture& arch() const { return arch_; }
    const std::vector<double>& parameters() const { return params_; }
    std::vector<double>& parameters() { return params_; }

    bool operator==(const EmbeddingModel&) const = default;

private:
    Architecture arch_;
    std::vector<double> params_;
};

/// Phi(x). Pure; throws DimensionError if x does not match the input shape.
FeatureVector forward(const EmbeddingModel& model, const Image& x);

/// d <Phi(x), upstream> / dx via reverse-mode accumulation.
Perturbation input_gradient(const EmbeddingModel& model, const Image& x,
                            const FeatureVector& upstream);

/// Phi over a batch; parallel over images, order-preserving.
std::vector<FeatureVector> batch_features(const EmbeddingModel& model,
                                          const std::vector<Image>& images);

/// Backbone plus softmax head over an ordered label list.
struct ClassifierModel {
    EmbeddingModel backbone;
    std::vector<double> head_w;  // [n_classes][feature_dim]
    std::vector<double> head_b;  // [n_classes]
    std::vector<int> class_labels;

    int n_classes() const { return static_cast<int>(class_labels.size()); }
    std::vector<double> probabilities(const Image& x) const;
    int predict(const Image& x) const;  // argmax probability -> label
    int label_index(int label) const;   // -1 when absent
};

struct TrainConfig {
    int epochs = 30;
    int batch_size = 16;
    double learning_rate = 0.1;
    std::uint64_t seed = 1;
    double weight_init_scale = 1.0;

    void validate() const;
};

struct TrainReport {
    double initial_loss = 0.0;
    double final_loss = 0.0;
    double train_accuracy = 0.0;
};

/// Mini-batch SGD on softmax cross-entropy. Deterministic given (seed, data,
/// config); the backbone starts from init_backbone when given, otherwise from
/// a seeded initialization.
ClassifierModel train_classifier(const LabeledDataset& dataset, const TrainConfig& cfg,
                                 const EmbeddingModel* init_backbone = nullptr,
                                 TrainReport* report = nullptr);

/// Trains a throwaway classifier on the public pool and keeps the backbone.
EmbeddingModel pretrain_feature_extractor(const LabeledDataset& public_pool,
                                          const TrainConfig& cfg);

/// Cross-entropy of one example; exposed for the finite-difference tests.
double classifier_loss(const ClassifierModel& m, const Image& x, int class_index);

/// Per-example gradient of classifier_loss with respect to every parameter.
/// Layout: [backbone params][head_w][head_b]. Returns the loss.
double classifier_example_grad(const ClassifierModel& m, const Image& x,
                               int class_index, std::vector<double>& grad);

std::size_t classifier_param_count(const ClassifierModel& m);

// Binary model files: 16-byte header (4-byte magic, u32 version, u64
// architecture hash, all little-endian), then the flat f64 parameter vector.
// Classifier files add the label list and head parameters after the header.
void save_model(const EmbeddingModel& model, const std::string& path);
EmbeddingModel load_model(const std::string& path, const Architecture& expected = {});
void save_classifier(const ClassifierModel& model, const std::string& path);
ClassifierModel load_classifier(const std::string& path, const Architecture& expected = {});

}  // namespace oriole
