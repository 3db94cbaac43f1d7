#include "oriole/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>

#include "oriole/errors.hpp"
#include "oriole/rng.hpp"

namespace oriole {

std::uint64_t Architecture::hash() const {
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
    auto eat = [&h](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 1099511628211ULL;
        }
    };
    eat(static_cast<std::uint64_t>(input_size));
    eat(static_cast<std::uint64_t>(conv1_maps));
    eat(static_cast<std::uint64_t>(conv2_maps));
    eat(static_cast<std::uint64_t>(kernel));
    eat(static_cast<std::uint64_t>(stride));
    eat(static_cast<std::uint64_t>(pad));
    eat(static_cast<std::uint64_t>(feature_dim));
    return h;
}

EmbeddingModel EmbeddingModel::seeded(const Architecture& arch, std::uint64_t seed,
                                      double init_scale) {
    if (!(init_scale > 0.0)) throw InputError("EmbeddingModel: init_scale must be > 0");
    EmbeddingModel m(arch);
    auto fill = [&](std::size_t off, std::size_t count, int fan_in, std::uint64_t stream) {
        CounterRng rng(seed, stream);
        const double s = init_scale / std::sqrt(static_cast<double>(fan_in));
        for (std::size_t i = 0; i < count; ++i)
            m.params_[off + i] = rng.uniform(i, -s, s);
    };
    const int k2 = arch.kernel * arch.kernel;
    fill(arch.conv1_w_off(), arch.conv1_w_count() + arch.conv1_maps, k2, 0);
    fill(arch.conv2_w_off(), arch.conv2_w_count() + arch.conv2_maps, arch.conv1_maps * k2, 1);
    fill(arch.fc_w_off(), arch.fc_w_count() + arch.feature_dim, arch.flat_dim(), 2);
    return m;
}

namespace {

struct Trace {
    std::vector<double> input;      // centered pixels (x - 0.5)
    std::vector<double> conv1_pre;  // [c1][s1][s1]
    std::vector<double> conv1_act;
    std::vector<double> conv2_pre;  // [c2][s2][s2]
    std::vector<double> conv2_act;  // flattened input of the affine layer
    FeatureVector features;
};

// out[oc][oy][ox] = b[oc] + sum_ic sum_ky sum_kx w[oc][ic][ky][kx] * in[ic][...]
void conv_forward(const double* w, const double* b, const double* in, double* out,
                  int in_ch, int in_s, int out_ch, int out_s, int k, int stride, int pad) {
    for (int oc = 0; oc < out_ch; ++oc) {
        for (int oy = 0; oy < out_s; ++oy) {
            for (int ox = 0; ox < out_s; ++ox) {
                double acc = b[oc];
                for (int ic = 0; ic < in_ch; ++ic) {
                    const double* wrow = w + ((static_cast<std::size_t>(oc) * in_ch + ic) * k * k);
                    const double* iplane = in + static_cast<std::size_t>(ic) * in_s * in_s;
                    for (int ky = 0; ky < k; ++ky) {
                        const int iy = oy * stride + ky - pad;
                        if (iy < 0 || iy >= in_s) continue;
                        for (int kx = 0; kx < k; ++kx) {
                            const int ix = ox * stride + kx - pad;
                            if (ix < 0 || ix >= in_s) continue;
                            acc += wrow[ky * k + kx] * iplane[iy * in_s + ix];
                        }
                    }
                }
                out[(static_cast<std::size_t>(oc) * out_s + oy) * out_s + ox] = acc;
            }
        }
    }
}

// Scatters d_out back through the convolution to d_in (gather over outputs).
void conv_backward_input(const double* w, const double* d_out, double* d_in,
                         int in_ch, int in_s, int out_ch, int out_s, int k, int stride,
                         int pad) {
    for (int ic = 0; ic < in_ch; ++ic) {
        for (int iy = 0; iy < in_s; ++iy) {
            for (int ix = 0; ix < in_s; ++ix) {
                double acc = 0.0;
                for (int oc = 0; oc < out_ch; ++oc) {
                    const double* wrow = w + ((static_cast<std::size_t>(oc) * in_ch + ic) * k * k);
                    const double* dplane = d_out + static_cast<std::size_t>(oc) * out_s * out_s;
                    for (int ky = 0; ky < k; ++ky) {
                        const int num_y = iy + pad - ky;
                        if (num_y < 0 || num_y % stride != 0) continue;
                        const int oy = num_y / stride;
                        if (oy >= out_s) continue;
                        for (int kx = 0; kx < k; ++kx) {
                            const int num_x = ix + pad - kx;
                            if (num_x < 0 || num_x % stride != 0) continue;
                            const int ox = num_x / stride;
                            if (ox >= out_s) continue;
                            acc += wrow[ky * k + kx] * dplane[oy * out_s + ox];
                        }
                    }
                }
                d_in[(static_cast<std::size_t>(ic) * in_s + iy) * in_s + ix] = acc;
            }
        }
    }
}

// Accumulates weight/bias gradients for one convolution layer.
void conv_backward_params(const double* d_out, const double* in, double* d_w, double* d_b,
                          int in_ch, int in_s, int out_ch, int out_s, int k, int stride,
                          int pad) {
    for (int oc = 0; oc < out_ch; ++oc) {
        const double* dplane = d_out + static_cast<std::size_t>(oc) * out_s * out_s;
        double db = 0.0;
        for (int i = 0; i < out_s * out_s; ++i) db += dplane[i];
        d_b[oc] += db;
        for (int ic = 0; ic < in_ch; ++ic) {
            const double* iplane = in + static_cast<std::size_t>(ic) * in_s * in_s;
            double* wrow = d_w + ((static_cast<std::size_t>(oc) * in_ch + ic) * k * k);
            for (int ky = 0; ky < k; ++ky) {
                for (int kx = 0; kx < k; ++kx) {
                    double acc = 0.0;
                    for (int oy = 0; oy < out_s; ++oy) {
                        const int iy = oy * stride + ky - pad;
                        if (iy < 0 || iy >= in_s) continue;
                        for (int ox = 0; ox < out_s; ++ox) {
                            const int ix = ox * stride + kx - pad;
                            if (ix < 0 || ix >= in_s) continue;
                            acc += dplane[oy * out_s + ox] * iplane[iy * in_s + ix];
                        }
                    }
                    wrow[ky * k + kx] += acc;
                }
            }
        }
    }
}

void forward_trace(const EmbeddingModel& model, const Image& x, Trace& t) {
    const Architecture& a = model.arch();
    if (x.width() != a.input_size || x.height() != a.input_size)
        throw DimensionError("forward: image does not match the architecture input size");
    const double* p = model.parameters().data();
    const int s1 = a.conv1_out();
    const int s2 = a.conv2_out();

    // zero-centered input keeps the shared luminance level out of the
    // first-layer gradients
    t.input.resize(x.pixels().size());
    for (std::size_t i = 0; i < t.input.size(); ++i) t.input[i] = x.pixels()[i] - 0.5;

    t.conv1_pre.assign(static_cast<std::size_t>(a.conv1_maps) * s1 * s1, 0.0);
    conv_forward(p + a.conv1_w_off(), p + a.conv1_b_off(), t.input.data(),
                 t.conv1_pre.data(), 1, a.input_size, a.conv1_maps, s1, a.kernel, a.stride,
                 a.pad);
    t.conv1_act = t.conv1_pre;
    for (double& v : t.conv1_act) v = v > 0.0 ? v : 0.0;

    t.conv2_pre.assign(static_cast<std::size_t>(a.conv2_maps) * s2 * s2, 0.0);
    conv_forward(p + a.conv2_w_off(), p + a.conv2_b_off(), t.conv1_act.data(),
                 t.conv2_pre.data(), a.conv1_maps, s1, a.conv2_maps, s2, a.kernel, a.stride,
                 a.pad);
    t.conv2_act = t.conv2_pre;
    for (double& v : t.conv2_act) v = v > 0.0 ? v : 0.0;

    t.features.assign(static_cast<std::size_t>(a.feature_dim), 0.0);
    const double* fw = p + a.fc_w_off();
    const double* fb = p + a.fc_b_off();
    const int flat = a.flat_dim();
    for (int j = 0; j < a.feature_dim; ++j) {
        double acc = fb[j];
        const double* row = fw + static_cast<std::size_t>(j) * flat;
        for (int f = 0; f < flat; ++f) acc += row[f] * t.conv2_act[static_cast<std::size_t>(f)];
        t.features[static_cast<std::size_t>(j)] = acc;
    }
}

// Backward from d_features to the input image; reuses the trace activations.
void backward_input(const EmbeddingModel& model, const Trace& t, const FeatureVector& dfeat,
                    double* d_input) {
    const Architecture& a = model.arch();
    const double* p = model.parameters().data();
    const int s1 = a.conv1_out();
    const int s2 = a.conv2_out();
    const int flat = a.flat_dim();

    std::vector<double> dflat(static_cast<std::size_t>(flat), 0.0);
    const double* fw = p + a.fc_w_off();
    for (int j = 0; j < a.feature_dim; ++j) {
        const double g = dfeat[static_cast<std::size_t>(j)];
        if (g == 0.0) continue;
        const double* row = fw + static_cast<std::size_t>(j) * flat;
        for (int f = 0; f < flat; ++f) dflat[static_cast<std::size_t>(f)] += g * row[f];
    }
    for (int f = 0; f < flat; ++f)
        if (t.conv2_pre[static_cast<std::size_t>(f)] <= 0.0) dflat[static_cast<std::size_t>(f)] = 0.0;

    std::vector<double> dconv1(static_cast<std::size_t>(a.conv1_maps) * s1 * s1, 0.0);
    conv_backward_input(p + a.conv2_w_off(), dflat.data(), dconv1.data(), a.conv1_maps, s1,
                        a.conv2_maps, s2, a.kernel, a.stride, a.pad);
    for (std::size_t i = 0; i < dconv1.size(); ++i)
        if (t.conv1_pre[i] <= 0.0) dconv1[i] = 0.0;

    conv_backward_input(p + a.conv1_w_off(), dconv1.data(), d_input, 1, a.input_size,
                        a.conv1_maps, s1, a.kernel, a.stride, a.pad);
}

}  // namespace

FeatureVector forward(const EmbeddingModel& model, const Image& x) {
    Trace t;
    forward_trace(model, x, t);
    return std::move(t.features);
}

Perturbation input_gradient(const EmbeddingModel& model, const Image& x,
                            const FeatureVector& upstream) {
    if (upstream.size() != static_cast<std::size_t>(model.arch().feature_dim))
        throw DimensionError("input_gradient: upstream length != feature_dim");
    Trace t;
    forward_trace(model, x, t);
    Perturbation g(x.width(), x.height());
    backward_input(model, t, upstream, g.delta.data());
    return g;
}

std::vector<FeatureVector> batch_features(const EmbeddingModel& model,
                                          const std::vector<Image>& images) {
    std::vector<FeatureVector> out(images.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < static_cast<long>(images.size()); ++i)
        out[static_cast<std::size_t>(i)] = forward(model, images[static_cast<std::size_t>(i)]);
    return out;
}

void TrainConfig::validate() const {
    if (epochs < 1) throw InputError("TrainConfig: epochs must be >= 1");
    if (batch_size < 1) throw InputError("TrainConfig: batch_size must be >= 1");
    if (!(learning_rate > 0.0)) throw InputError("TrainConfig: learning_rate must be > 0");
    if (!(weight_init_scale > 0.0)) throw InputError("TrainConfig: weight_init_scale must be > 0");
}

int ClassifierModel::label_index(int label) const {
    auto it = std::find(class_labels.begin(), class_labels.end(), label);
    return it == class_labels.end() ? -1 : static_cast<int>(it - class_labels.begin());
}

namespace {

std::vector<double> softmax(const std::vector<double>& logits) {
    double mx = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - mx);
        sum += p[i];
    }
    for (double& v : p) v /= sum;
    return p;
}

std::vector<double> head_logits(const ClassifierModel& m, const FeatureVector& feat) {
    const int d = m.backbone.arch().feature_dim;
    std::vector<double> logits(static_cast<std::size_t>(m.n_classes()));
    for (int c = 0; c < m.n_classes(); ++c) {
        double acc = m.head_b[static_cast<std::size_t>(c)];
        const double* row = m.head_w.data() + static_cast<std::size_t>(c) * d;
        for (int j = 0; j < d; ++j) acc += row[j] * feat[static_cast<std::size_t>(j)];
        logits[static_cast<std::size_t>(c)] = acc;
    }
    return logits;
}

}  // namespace

std::vector<double> ClassifierModel::probabilities(const Image& x) const {
    return softmax(head_logits(*this, forward(backbone, x)));
}

int ClassifierModel::predict(const Image& x) const {
    auto p = probabilities(x);
    std::size_t best = 0;
    for (std::size_t i = 1; i < p.size(); ++i)
        if (p[i] > p[best]) best = i;
    return class_labels[best];
}

std::size_t classifier_param_count(const ClassifierModel& m) {
    return m.backbone.parameters().size() + m.head_w.size() + m.head_b.size();
}

double classifier_loss(const ClassifierModel& m, const Image& x, int class_index) {
    auto p = softmax(head_logits(m, forward(m.backbone, x)));
    return -std::log(std::max(p[static_cast<std::size_t>(class_index)], 1e-300));
}

double classifier_example_grad(const ClassifierModel& m, const Image& x, int class_index,
                               std::vector<double>& grad) {
    const Architecture& a = m.backbone.arch();
    const int d = a.feature_dim;
    const int nc = m.n_classes();
    grad.assign(classifier_param_count(m), 0.0);

    Trace t;
    forward_trace(m.backbone, x, t);
    auto logits = head_logits(m, t.features);
    auto p = softmax(logits);
    const double loss = -std::log(std::max(p[static_cast<std::size_t>(class_index)], 1e-300));

    // d loss / d logits = p - onehot
    std::vector<double> dlogits = p;
    dlogits[static_cast<std::size_t>(class_index)] -= 1.0;

    const std::size_t nb = m.backbone.parameters().size();
    double* d_head_w = grad.data() + nb;
    double* d_head_b = d_head_w + m.head_w.size();
    FeatureVector dfeat(static_cast<std::size_t>(d), 0.0);
    for (int c = 0; c < nc; ++c) {
        const double g = dlogits[static_cast<std::size_t>(c)];
        d_head_b[c] += g;
        const double* wrow = m.head_w.data() + static_cast<std::size_t>(c) * d;
        double* dwrow = d_head_w + static_cast<std::size_t>(c) * d;
        for (int j = 0; j < d; ++j) {
            dwrow[j] += g * t.features[static_cast<std::size_t>(j)];
            dfeat[static_cast<std::size_t>(j)] += g * wrow[j];
        }
    }

    // backbone: affine, then the two convolutions
    const int s1 = a.conv1_out();
    const int s2 = a.conv2_out();
    const int flat = a.flat_dim();
    const double* params = m.backbone.parameters().data();

    double* d_fc_w = grad.data() + a.fc_w_off();
    double* d_fc_b = grad.data() + a.fc_b_off();
    std::vector<double> dflat(static_cast<std::size_t>(flat), 0.0);
    const double* fw = params + a.fc_w_off();
    for (int j = 0; j < d; ++j) {
        const double g = dfeat[static_cast<std::size_t>(j)];
        d_fc_b[j] += g;
        const double* row = fw + static_cast<std::size_t>(j) * flat;
        double* drow = d_fc_w + static_cast<std::size_t>(j) * flat;
        for (int f = 0; f < flat; ++f) {
            drow[f] += g * t.conv2_act[static_cast<std::size_t>(f)];
            dflat[static_cast<std::size_t>(f)] += g * row[f];
        }
    }
    for (int f = 0; f < flat; ++f)
        if (t.conv2_pre[static_cast<std::size_t>(f)] <= 0.0) dflat[static_cast<std::size_t>(f)] = 0.0;

    conv_backward_params(dflat.data(), t.conv1_act.data(), grad.data() + a.conv2_w_off(),
                         grad.data() + a.conv2_b_off(), a.conv1_maps, s1, a.conv2_maps, s2,
                         a.kernel, a.stride, a.pad);

    std::vector<double> dconv1(static_cast<std::size_t>(a.conv1_maps) * s1 * s1, 0.0);
    conv_backward_input(params + a.conv2_w_off(), dflat.data(), dconv1.data(), a.conv1_maps,
                        s1, a.conv2_maps, s2, a.kernel, a.stride, a.pad);
    for (std::size_t i = 0; i < dconv1.size(); ++i)
        if (t.conv1_pre[i] <= 0.0) dconv1[i] = 0.0;

    conv_backward_params(dconv1.data(), t.input.data(), grad.data() + a.conv1_w_off(),
                         grad.data() + a.conv1_b_off(), 1, a.input_size, a.conv1_maps, s1,
                         a.kernel, a.stride, a.pad);
    return loss;
}

namespace {

double mean_loss(const ClassifierModel& m, const LabeledDataset& data,
                 const std::vector<int>& class_index, double* accuracy = nullptr) {
    const long n = static_cast<long>(data.size());
    std::vector<double> losses(static_cast<std::size_t>(n));
    std::vector<unsigned char> hit(static_cast<std::size_t>(n), 0);
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        auto p = softmax(head_logits(m, forward(m.backbone, data.images[static_cast<std::size_t>(i)])));
        const int ci = class_index[static_cast<std::size_t>(i)];
        losses[static_cast<std::size_t>(i)] = -std::log(std::max(p[static_cast<std::size_t>(ci)], 1e-300));
        std::size_t best = 0;
        for (std::size_t c = 1; c < p.size(); ++c)
            if (p[c] > p[best]) best = c;
        hit[static_cast<std::size_t>(i)] = best == static_cast<std::size_t>(ci) ? 1 : 0;
    }
    double total = 0.0;
    long correct = 0;
    for (long i = 0; i < n; ++i) {
        total += losses[static_cast<std::size_t>(i)];
        correct += hit[static_cast<std::size_t>(i)];
    }
    if (accuracy) *accuracy = static_cast<double>(correct) / static_cast<double>(n);
    return total / static_cast<double>(n);
}

}  // namespace

ClassifierModel train_classifier(const LabeledDataset& dataset, const TrainConfig& cfg,
                                 const EmbeddingModel* init_backbone, TrainReport* report) {
    cfg.validate();
    if (dataset.empty()) throw InputError("train_classifier: empty dataset");
    for (int l : dataset.labels)
        if (l < 0) throw InputError("train_classifier: negative class label");

    ClassifierModel m;
    m.class_labels = dataset.label_set();
    const Architecture arch = init_backbone ? init_backbone->arch() : Architecture{};
    m.backbone = init_backbone ? *init_backbone
                               : EmbeddingModel::seeded(arch, derive_seed(cfg.seed, 0x6261636bULL),
                                                        cfg.weight_init_scale);
    const int d = arch.feature_dim;
    const int nc = static_cast<int>(m.class_labels.size());
    {
        CounterRng rng(derive_seed(cfg.seed, 0x68656164ULL), 0);
        const double s = cfg.weight_init_scale / std::sqrt(static_cast<double>(d));
        m.head_w.assign(static_cast<std::size_t>(nc) * d, 0.0);
        m.head_b.assign(static_cast<std::size_t>(nc), 0.0);
        for (std::size_t i = 0; i < m.head_w.size(); ++i) m.head_w[i] = rng.uniform(i, -s, s);
        for (std::size_t i = 0; i < m.head_b.size(); ++i)
            m.head_b[i] = rng.uniform(m.head_w.size() + i, -s, s);
    }

    std::map<int, int> index_of;
    for (int c = 0; c < nc; ++c) index_of[m.class_labels[static_cast<std::size_t>(c)]] = c;
    std::vector<int> class_index(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i)
        class_index[i] = index_of.at(dataset.labels[i]);

    if (report) report->initial_loss = mean_loss(m, dataset, class_index);

    const std::size_t nparams = classifier_param_count(m);
    const std::size_t nb = m.backbone.parameters().size();
    std::vector<int> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::vector<double>> example_grads(
        static_cast<std::size_t>(std::min<std::size_t>(cfg.batch_size, dataset.size())));
    std::vector<double> batch_grad(nparams);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        CounterRng shuffle_rng(derive_seed(cfg.seed, 0x65706f63ULL), static_cast<std::uint64_t>(epoch));
        deterministic_shuffle(order, shuffle_rng);
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const long bs = static_cast<long>(std::min<std::size_t>(cfg.batch_size, order.size() - start));
            // per-example slots summed in batch order: bit-stable for any
            // number of threads
#pragma omp parallel for schedule(static)
            for (long i = 0; i < bs; ++i) {
                const int idx = order[start + static_cast<std::size_t>(i)];
                classifier_example_grad(m, dataset.images[static_cast<std::size_t>(idx)],
                                        class_index[static_cast<std::size_t>(idx)],
                                        example_grads[static_cast<std::size_t>(i)]);
            }
            std::fill(batch_grad.begin(), batch_grad.end(), 0.0);
            for (long i = 0; i < bs; ++i) {
                const std::vector<double>& g = example_grads[static_cast<std::size_t>(i)];
                for (std::size_t j = 0; j < nparams; ++j) batch_grad[j] += g[j];
            }
            const double step = cfg.learning_rate / static_cast<double>(bs);
            double* bp = m.backbone.parameters().data();
            for (std::size_t j = 0; j < nb; ++j) bp[j] -= step * batch_grad[j];
            for (std::size_t j = 0; j < m.head_w.size(); ++j)
                m.head_w[j] -= step * batch_grad[nb + j];
            for (std::size_t j = 0; j < m.head_b.size(); ++j)
                m.head_b[j] -= step * batch_grad[nb + m.head_w.size() + j];
        }
    }

    if (report) report->final_loss = mean_loss(m, dataset, class_index, &report->train_accuracy);
    return m;
}

EmbeddingModel pretrain_feature_extractor(const LabeledDataset& public_pool,
                                          const TrainConfig& cfg) {
    if (public_pool.empty()) throw InputError("pretrain_feature_extractor: empty pool");
    ClassifierModel m = train_classifier(public_pool, cfg);
    return m.backbone;
}

// ---------------------------------------------------------------------------
// serialization

namespace {

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void put_f64(std::string& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(out, bits);
}

struct Reader {
    const unsigned char* p;
    std::size_t n;
    std::size_t pos = 0;
    void need(std::size_t k) const {
        if (pos + k > n) throw InputError("model file: truncated");
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[pos + i]) << (8 * i);
        pos += 8;
        return v;
    }
    double f64() {
        std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
};

std::string file_header(const char magic[4], const Architecture& arch) {
    std::string out(magic, magic + 4);
    put_u32(out, 1);  // version
    put_u64(out, arch.hash());
    return out;
}

std::vector<unsigned char> slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open: " + path);
    return std::vector<unsigned char>((std::istreambuf_iterator<char>(f)),
                                      std::istreambuf_iterator<char>());
}

void check_header(Reader& r, const char magic[4], const Architecture& expected) {
    r.need(4);
    if (std::memcmp(r.p, magic, 4) != 0) throw InputError("model file: bad magic");
    r.pos += 4;
    if (r.u32() != 1) throw InputError("model file: unsupported version");
    if (r.u64() != expected.hash()) throw InputError("model file: architecture hash mismatch");
}

void write_all(const std::string& path, const std::string& bytes) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot open for writing: " + path);
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw InputError("write failed: " + path);
}

}  // namespace

void save_model(const EmbeddingModel& model, const std::string& path) {
    std::string out = file_header("ORIM", model.arch());
    for (double v : model.parameters()) put_f64(out, v);
    write_all(path, out);
}

EmbeddingModel load_model(const std::string& path, const Architecture& expected) {
    auto bytes = slurp(path);
    Reader r{bytes.data(), bytes.size()};
    check_header(r, "ORIM", expected);
    EmbeddingModel m(expected);
    for (double& v : m.parameters()) v = r.f64();
    if (r.pos != r.n) throw InputError("model file: trailing bytes");
    return m;
}

void save_classifier(const ClassifierModel& model, const std::string& path) {
    std::string out = file_header("ORIC", model.backbone.arch());
    put_u32(out, static_cast<std::uint32_t>(model.n_classes()));
    for (int l : model.class_labels) put_u32(out, static_cast<std::uint32_t>(l));
    for (double v : model.backbone.parameters()) put_f64(out, v);
    for (double v : model.head_w) put_f64(out, v);
    for (double v : model.head_b) put_f64(out, v);
    write_all(path, out);
}

ClassifierModel load_classifier(const std::string& path, const Architecture& expected) {
    auto bytes = slurp(path);
    Reader r{bytes.data(), bytes.size()};
    check_header(r, "ORIC", expected);
    const std::uint32_t nc = r.u32();
    if (nc == 0 || nc > 1u << 20) throw InputError("classifier file: class count out of range");
    ClassifierModel m;
    m.backbone = EmbeddingModel(expected);
    m.class_labels.resize(nc);
    for (auto& l : m.class_labels) l = static_cast<int>(r.u32());
    for (double& v : m.backbone.parameters()) v = r.f64();
    m.head_w.resize(static_cast<std::size_t>(nc) * expected.feature_dim);
    m.head_b.resize(nc);
    for (double& v : m.head_w) v = r.f64();
    for (double& v : m.head_b) v = r.f64();
    if (r.pos != r.n) throw InputError("classifier file: trailing bytes");
    return m;
}

}  // namespace oriole
