#pragma once

#include <string>
#include <vector>

#include "oriole/image.hpp"

namespace oriole {

/// Ordered (image, class-label) pairs.
struct LabeledDataset {
    std::vector<Image> images;
    std::vector<int> labels;

    std::size_t size() const { return images.size(); }
    bool empty() const { return images.empty(); }
    void push_back(Image img, int label) {
        images.push_back(std::move(img));
        labels.push_back(label);
    }
    void append(const LabeledDataset& other);
    std::vector<int> label_set() const;  // sorted, unique
};

/// One synthetic run's named splits. Labels use disjoint ranges:
/// [0, n_public) public pool, [n_public, n_public + n_attacker) attacker
/// pool, and the single user holds label n_public + n_attacker.
struct DatasetBundle {
    LabeledDataset public_pool;
    LabeledDataset attacker_pool;
    LabeledDataset user;
    int n_public = 0;
    int n_attacker = 0;
    int user_label = 0;
};

/// Writes <dir>/manifest.csv plus PGM files under <dir>/images/<role>/.
void save_bundle(const DatasetBundle& bundle, const std::string& dir);
DatasetBundle load_bundle(const std::string& dir);

}  // namespace oriole
