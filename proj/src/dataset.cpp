#include "oriole/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oriole/errors.hpp"

namespace fs = std::filesystem;

namespace oriole {

void LabeledDataset::append(const LabeledDataset& other) {
    images.insert(images.end(), other.images.begin(), other.images.end());
    labels.insert(labels.end(), other.labels.begin(), other.labels.end());
}

std::vector<int> LabeledDataset::label_set() const {
    std::vector<int> out = labels;
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

constexpr const char* kManifestHeader = "# oriole manifest v1\npath,label,role\n";

std::string image_rel_path(const char* role, int label, int index) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "images/%s/l%04d_i%04d.pgm", role, label, index);
    return buf;
}

void save_split(const LabeledDataset& split, const char* role, const fs::path& dir,
                std::ostream& manifest) {
    fs::create_directories(dir / "images" / role);
    int prev_label = -1;
    int index = 0;
    for (std::size_t i = 0; i < split.size(); ++i) {
        if (split.labels[i] != prev_label) {
            prev_label = split.labels[i];
            index = 0;
        }
        std::string rel = image_rel_path(role, split.labels[i], index++);
        write_pgm(split.images[i], (dir / rel).string());
        manifest << rel << "," << split.labels[i] << "," << role << "\n";
    }
}

}  // namespace

void save_bundle(const DatasetBundle& bundle, const std::string& dir) {
    fs::create_directories(dir);
    std::ostringstream manifest;
    manifest << kManifestHeader;
    save_split(bundle.public_pool, "public", dir, manifest);
    save_split(bundle.attacker_pool, "attacker", dir, manifest);
    save_split(bundle.user, "user", dir, manifest);
    std::ofstream f(fs::path(dir) / "manifest.csv", std::ios::binary);
    if (!f) throw InputError("cannot write manifest under: " + dir);
    f << manifest.str();
}

DatasetBundle load_bundle(const std::string& dir) {
    std::ifstream f(fs::path(dir) / "manifest.csv");
    if (!f)
        throw InputError("no dataset manifest at " + dir +
                         "/manifest.csv (run the generate subcommand first)");
    DatasetBundle bundle;
    std::string line;
    bool saw_header = false;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!saw_header) {
            if (line != "path,label,role") throw InputError("manifest: unexpected header");
            saw_header = true;
            continue;
        }
        std::size_t c1 = line.find(',');
        std::size_t c2 = line.find(',', c1 == std::string::npos ? 0 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw InputError("manifest: malformed row: " + line);
        std::string rel = line.substr(0, c1);
        int label = std::stoi(line.substr(c1 + 1, c2 - c1 - 1));
        std::string role = line.substr(c2 + 1);
        Image img = read_pgm((fs::path(dir) / rel).string());
        if (role == "public")
            bundle.public_pool.push_back(std::move(img), label);
        else if (role == "attacker")
            bundle.attacker_pool.push_back(std::move(img), label);
        else if (role == "user")
            bundle.user.push_back(std::move(img), label);
        else
            throw InputError("manifest: unknown role: " + role);
    }
    if (!saw_header) throw InputError("manifest: missing header row");

    bundle.n_public = static_cast<int>(bundle.public_pool.label_set().size());
    bundle.n_attacker = static_cast<int>(bundle.attacker_pool.label_set().size());
    auto user_labels = bundle.user.label_set();
    if (user_labels.size() != 1) throw InputError("manifest: expected exactly one user identity");
    bundle.user_label = user_labels.front();
    return bundle;
}

}  // namespace oriole
