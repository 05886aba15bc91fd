#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "treg/common.hpp"
#include "treg/tensor_file.hpp"

namespace treg {

inline TensorData to_tensor(const Mat& m) {
    TensorData t;
    t.dtype = TensorDtype::F64;
    t.dims = {static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols())};
    t.values.assign(m.data(), m.data() + m.size());  // row-major either way
    return t;
}

inline Mat to_matrix(const TensorData& t) {
    if (t.dims.size() != 2) fail("checkpoint: tensor has ", t.dims.size(), " dims, expected 2");
    Mat m(static_cast<long>(t.dims[0]), static_cast<long>(t.dims[1]));
    std::copy(t.values.begin(), t.values.end(), m.data());
    return m;
}

struct Checkpoint {
    nlohmann::json meta;
    std::vector<std::pair<std::string, Mat>> tensors;

    const Mat& tensor(const std::string& name) const {
        for (const auto& [n, m] : tensors)
            if (n == name) return m;
        fail("checkpoint: no tensor named '", name, "'");
    }
};

// Layout: a JSON manifest next to a flat binary of concatenated TRTE records.
// The manifest names each record and gives its byte range in the data file.
inline void write_checkpoint(const std::string& manifest_path, const nlohmann::json& meta,
                             const std::vector<std::string>& names,
                             const std::vector<const Mat*>& mats) {
    if (names.size() != mats.size())
        fail("checkpoint: ", names.size(), " names for ", mats.size(), " tensors");
    namespace fs = std::filesystem;
    fs::path mpath(manifest_path);
    fs::path bpath = mpath;
    bpath.replace_extension(".bin");
    if (bpath == mpath) bpath += ".bin";

    std::ofstream bin(bpath, std::ios::binary | std::ios::trunc);
    if (!bin) fail("checkpoint: cannot open ", bpath.string(), " for writing");
    nlohmann::json entries = nlohmann::json::array();
    for (std::size_t i = 0; i < names.size(); ++i) {
        const auto offset = static_cast<std::uint64_t>(bin.tellp());
        write_trte(bin, to_tensor(*mats[i]));
        const auto end = static_cast<std::uint64_t>(bin.tellp());
        entries.push_back({{"name", names[i]},
                           {"offset", offset},
                           {"length", end - offset},
                           {"dims", {mats[i]->rows(), mats[i]->cols()}}});
    }
    bin.close();
    if (!bin) fail("checkpoint: failed writing ", bpath.string());

    nlohmann::json manifest = {{"format", "treg-checkpoint"},
                               {"version", 1},
                               {"data_file", bpath.filename().string()},
                               {"model", meta},
                               {"tensors", entries}};
    std::ofstream mf(mpath, std::ios::trunc);
    if (!mf) fail("checkpoint: cannot open ", manifest_path, " for writing");
    mf << manifest.dump(2) << '\n';
    if (!mf) fail("checkpoint: failed writing ", manifest_path);
}

inline Checkpoint read_checkpoint(const std::string& manifest_path) {
    namespace fs = std::filesystem;
    std::ifstream mf(manifest_path);
    if (!mf) fail("checkpoint: cannot open ", manifest_path);
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(mf);
    } catch (const nlohmann::json::exception& e) {
        fail("checkpoint: bad manifest ", manifest_path, ": ", e.what());
    }
    if (manifest.value("format", "") != "treg-checkpoint")
        fail("checkpoint: ", manifest_path, " is not a treg checkpoint manifest");
    if (!manifest.contains("data_file") || !manifest.contains("tensors"))
        fail("checkpoint: manifest ", manifest_path, " missing data_file or tensors");

    fs::path bpath = fs::path(manifest_path).parent_path() /
                     manifest["data_file"].get<std::string>();
    std::ifstream bin(bpath, std::ios::binary);
    if (!bin) fail("checkpoint: cannot open data file ", bpath.string());

    Checkpoint ck;
    ck.meta = manifest.value("model", nlohmann::json::object());
    for (const auto& entry : manifest["tensors"]) {
        const std::string name = entry.at("name").get<std::string>();
        bin.seekg(static_cast<std::streamoff>(entry.at("offset").get<std::uint64_t>()));
        if (!bin) fail("checkpoint: bad offset for tensor '", name, "'");
        try {
            ck.tensors.emplace_back(name, to_matrix(read_trte(bin)));
        } catch (const std::exception& e) {
            fail("checkpoint: tensor '", name, "': ", e.what());
        }
    }
    return ck;
}

template <class Model>
void save_model(Model& model, const nlohmann::json& meta, const std::string& manifest_path) {
    auto params = model.params();
    std::vector<const Mat*> mats(params.begin(), params.end());
    write_checkpoint(manifest_path, meta, model.param_names(), mats);
}

template <class Model>
void apply_checkpoint(Model& model, const Checkpoint& ck) {
    auto params = model.params();
    auto names = model.param_names();
    if (ck.tensors.size() != params.size())
        fail("checkpoint: has ", ck.tensors.size(), " tensors, model expects ", params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        const auto& [name, m] = ck.tensors[i];
        if (name != names[i])
            fail("checkpoint: tensor ", i, " is '", name, "', model expects '", names[i], "'");
        if (m.rows() != params[i]->rows() || m.cols() != params[i]->cols())
            fail("checkpoint: tensor '", name, "' is ", m.rows(), "x", m.cols(),
                 ", model expects ", params[i]->rows(), "x", params[i]->cols());
        *params[i] = m;
    }
}

}  // namespace treg
