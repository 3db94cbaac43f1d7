// Times the OpenMP kernels against their serial reference twins.
//
//   bench_kernels [--quick]

#include <omp.h>

#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "oriole/cloak.hpp"
#include "oriole/dssim.hpp"
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

template <typename F>
double time_ms(int reps, F&& fn) {
    fn();  // warm up
    const double t0 = omp_get_wtime();
    for (int i = 0; i < reps; ++i) fn();
    return (omp_get_wtime() - t0) * 1000.0 / reps;
}

void report(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-28s serial %9.3f ms   omp %9.3f ms   speedup %.2fx\n", name, serial_ms,
                parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
    bool quick = false;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--quick") == 0) quick = true;

    const int img_size = quick ? 64 : 512;
    const int reps = quick ? 2 : 10;
    const int batch = quick ? 8 : 64;
    std::printf("threads: %d, image %dx%d, batch %d\n\n", omp_get_max_threads(), img_size,
                img_size, batch);

    Image a = random_image(img_size, 1);
    Image b = random_image(img_size, 2);
    double sink = 0.0;

    report("dssim",
           time_ms(reps, [&] { sink += ref::dssim_ref(a, b); }),
           time_ms(reps, [&] { sink += dssim(a, b); }));

    report("dssim_gradient (vs dssim ref)",
           time_ms(reps, [&] { sink += ref::dssim_ref(a, b); }),
           time_ms(reps, [&] { sink += dssim_gradient(a, b).delta[0]; }));

    EmbeddingModel model = EmbeddingModel::seeded(Architecture{}, 3, 1.0);
    std::vector<Image> images;
    for (int i = 0; i < batch; ++i) images.push_back(random_image(32, 100 + i));

    report("batch feature extraction",
           time_ms(reps, [&] {
               for (const Image& img : images) sink += ref::forward_ref(model, img)[0];
           }),
           time_ms(reps, [&] { sink += batch_features(model, images)[0][0]; }));

    // per-target cloak parallelism against a single-thread run
    CentroidTable table;
    for (int t = 0; t < (quick ? 2 : 8); ++t) {
        table.labels.push_back(t);
        FeatureVector c(32);
        CounterRng rng(50 + t);
        for (std::size_t j = 0; j < c.size(); ++j) c[j] = rng.uniform(j, -1.0, 1.0);
        table.centroids.push_back(std::move(c));
    }
    TargetSet targets;
    targets.labels = table.labels;
    targets.centroids = table.centroids;
    targets.scores.assign(table.labels.size(), 0.0);
    CloakConfig cc;
    cc.iterations = quick ? 5 : 40;

    const int max_threads = omp_get_max_threads();
    omp_set_num_threads(1);
    double serial_ms = time_ms(1, [&] { sink += multi_cloaks(images[0], targets, model, cc)[0].achieved_dssim; });
    omp_set_num_threads(max_threads);
    double parallel_ms = time_ms(1, [&] { sink += multi_cloaks(images[0], targets, model, cc)[0].achieved_dssim; });
    report("multi_cloaks", serial_ms, parallel_ms);

    std::printf("\n(checksum %g)\n", sink);
    return 0;
}
