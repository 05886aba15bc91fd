#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "test_util.hpp"
#include "treg/treg.hpp"

namespace treg {
namespace {

using testutil::TempDir;

DatasetFile text_opts() {
    DatasetFile opts;
    return opts;
}

TEST(Csv, NumericColumnsPassThrough) {
    const IngestResult r = ingest_csv_text("a,b,label\n1,2,0\n3.5,-1,1\n", text_opts());
    ASSERT_EQ(r.X.rows(), 2);
    ASSERT_EQ(r.X.cols(), 2);
    EXPECT_DOUBLE_EQ(r.X(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(r.X(1, 0), 3.5);
    EXPECT_DOUBLE_EQ(r.X(1, 1), -1.0);
    EXPECT_EQ(r.y, (std::vector<int>{0, 1}));
    EXPECT_EQ(r.feature_names, (std::vector<std::string>{"a", "b"}));
    ASSERT_EQ(r.encoders.size(), 2u);
    EXPECT_FALSE(r.encoders[0].categorical);
    EXPECT_TRUE(r.warnings.empty());
}

TEST(Csv, MissingNumericValuesImputeToZero) {
    const IngestResult r = ingest_csv_text("a,label\n,0\n2,1\n", text_opts());
    EXPECT_DOUBLE_EQ(r.X(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(r.X(1, 0), 2.0);
}

TEST(Csv, CategoricalColumnsUseFirstAppearanceCodes) {
    const IngestResult r = ingest_csv_text("color,label\nred,0\nblue,1\nred,0\n", text_opts());
    EXPECT_DOUBLE_EQ(r.X(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(r.X(1, 0), 1.0);
    EXPECT_DOUBLE_EQ(r.X(2, 0), 0.0);
    ASSERT_EQ(r.encoders.size(), 1u);
    EXPECT_TRUE(r.encoders[0].categorical);
    EXPECT_EQ(r.encoders[0].categories, (std::vector<std::string>{"red", "blue"}));
}

TEST(Csv, UnseenCategoryBecomesMinusOneWithWarning) {
    const IngestResult fitted =
        ingest_csv_text("color,label\nred,0\nblue,1\n", text_opts());
    const IngestResult r =
        ingest_csv_text("color,label\ngreen,0\nblue,1\n", text_opts(), &fitted.encoders);
    EXPECT_DOUBLE_EQ(r.X(0, 0), -1.0);
    EXPECT_DOUBLE_EQ(r.X(1, 0), 1.0);
    ASSERT_EQ(r.warnings.size(), 1u);
    EXPECT_NE(r.warnings[0].find("unseen category 'green'"), std::string::npos);
}

TEST(Csv, LabelColumnByNameAndIndex) {
    DatasetFile opts;
    opts.label_column = "y";
    const IngestResult by_name = ingest_csv_text("a,y,b\n1,0,5\n2,1,6\n", opts);
    EXPECT_EQ(by_name.y, (std::vector<int>{0, 1}));
    EXPECT_EQ(by_name.feature_names, (std::vector<std::string>{"a", "b"}));
    EXPECT_DOUBLE_EQ(by_name.X(0, 1), 5.0);

    opts.label_column = "0";
    const IngestResult by_index = ingest_csv_text("y,a\n1,7\n0,8\n", opts);
    EXPECT_EQ(by_index.y, (std::vector<int>{1, 0}));
    EXPECT_DOUBLE_EQ(by_index.X(0, 0), 7.0);

    opts.label_column = "missing";
    EXPECT_THROW(ingest_csv_text("a,b\n1,2\n", opts), std::runtime_error);
}

TEST(Csv, RejectsRaggedRows) {
    try {
        ingest_csv_text("a,b\n1\n", text_opts());
        FAIL() << "expected a field-count error";
    } catch (const std::exception& e) {
        EXPECT_NE(std::string(e.what()).find("fields"), std::string::npos) << e.what();
    }
}

TEST(Csv, RejectsNonBinaryLabels) {
    EXPECT_THROW(ingest_csv_text("a,label\n1,0\n2,1\n3,2\n", text_opts()), std::runtime_error);
    EXPECT_THROW(ingest_csv_text("a,label\n1,cat\n2,dog\n3,bird\n", text_opts()),
                 std::runtime_error);
    // two categorical levels are fine and get first-appearance codes
    const IngestResult r = ingest_csv_text("a,label\n1,yes\n2,no\n", text_opts());
    EXPECT_EQ(r.y, (std::vector<int>{0, 1}));
}

TEST(Csv, QuotedFieldsKeepDelimitersNewlinesAndEscapes) {
    const std::string text =
        "name,label\n"
        "\"a,b\",0\n"
        "\"line1\nline2\",1\n"
        "\"he said \"\"hi\"\"\",0\n";
    const IngestResult r = ingest_csv_text(text, text_opts());
    ASSERT_EQ(r.X.rows(), 3);
    ASSERT_TRUE(r.encoders[0].categorical);
    EXPECT_EQ(r.encoders[0].categories,
              (std::vector<std::string>{"a,b", "line1\nline2", "he said \"hi\""}));
    EXPECT_EQ(r.y, (std::vector<int>{0, 1, 0}));
}

TEST(Csv, ToleratesCrlfLineEndings) {
    const IngestResult r = ingest_csv_text("a,label\r\n1,0\r\n2,1\r\n", text_opts());
    ASSERT_EQ(r.X.rows(), 2);
    EXPECT_DOUBLE_EQ(r.X(1, 0), 2.0);
    EXPECT_EQ(r.feature_names[0], "a");
}

TEST(Csv, HonorsCustomDelimiter) {
    DatasetFile opts;
    opts.delimiter = ';';
    const IngestResult r = ingest_csv_text("a;b;label\n1;2;0\n3;4;1\n", opts);
    ASSERT_EQ(r.X.cols(), 2);
    EXPECT_DOUBLE_EQ(r.X(1, 1), 4.0);
}

TEST(Csv, SynthesizesNamesWithoutHeader) {
    DatasetFile opts;
    opts.has_header = false;
    const IngestResult r = ingest_csv_text("1,2,0\n3,4,1\n", opts);
    EXPECT_EQ(r.feature_names, (std::vector<std::string>{"c0", "c1"}));
    EXPECT_EQ(r.y, (std::vector<int>{0, 1}));
}

TEST(Csv, NoLabelModeKeepsEveryColumn) {
    DatasetFile opts;
    opts.has_label = false;
    const IngestResult r = ingest_csv_text("a,b\n1,2\n3,4\n", opts);
    EXPECT_TRUE(r.y.empty());
    ASSERT_EQ(r.X.cols(), 2);
    EXPECT_DOUBLE_EQ(r.X(1, 1), 4.0);
}

TEST(Csv, RejectsEmptyAndHeaderOnlyInput) {
    EXPECT_THROW(ingest_csv_text("", text_opts()), std::runtime_error);
    EXPECT_THROW(ingest_csv_text("a,label\n", text_opts()), std::runtime_error);
    EXPECT_THROW(ingest_csv_text("a,label\n\"oops,0\n", text_opts()), std::runtime_error);
}

TEST(Csv, ReadsFromDisk) {
    TempDir dir;
    const std::string path = dir.file("data.csv");
    testutil::write_text(path, "a,label\n1,0\n2,1\n");
    DatasetFile opts;
    opts.path = path;
    const IngestResult r = ingest_csv(opts);
    EXPECT_EQ(r.X.rows(), 2);
    opts.path = dir.file("absent.csv");
    EXPECT_THROW(ingest_csv(opts), std::runtime_error);
}

TEST(Csv, EncodersRoundTripThroughJson) {
    const IngestResult r =
        ingest_csv_text("color,size,label\nred,1,0\nblue,2,1\n", text_opts());
    const std::vector<ColumnEncoder> back = encoders_from_json(encoders_to_json(r.encoders));
    ASSERT_EQ(back.size(), 2u);
    EXPECT_TRUE(back[0].categorical);
    EXPECT_EQ(back[0].categories, r.encoders[0].categories);
    EXPECT_FALSE(back[1].categorical);

    nlohmann::json bad = nlohmann::json::array({{{"kind", "mystery"}}});
    EXPECT_THROW(encoders_from_json(bad), std::runtime_error);
}

TensorData sample_tensor(TensorDtype dtype) {
    TensorData t;
    t.dtype = dtype;
    t.dims = {2, 3};
    t.values = {0.1, -0.0, 1e300, -7.25, 3.0, 5e-324};
    return t;
}

TEST(Trte, F64RoundTripIsBitExact) {
    std::stringstream buf;
    write_trte(buf, sample_tensor(TensorDtype::F64));
    const TensorData back = read_trte(buf);
    EXPECT_EQ(back.dtype, TensorDtype::F64);
    EXPECT_EQ(back.dims, (std::vector<std::uint64_t>{2, 3}));
    const TensorData orig = sample_tensor(TensorDtype::F64);
    ASSERT_EQ(back.values.size(), orig.values.size());
    for (std::size_t i = 0; i < orig.values.size(); ++i) {
        EXPECT_EQ(std::memcmp(&back.values[i], &orig.values[i], sizeof(double)), 0) << i;
    }
}

TEST(Trte, F32RoundTripNarrowsOnce) {
    TensorData t;
    t.dtype = TensorDtype::F32;
    t.dims = {3};
    t.values = {0.1, -2.5, 1.0 / 3.0};
    std::stringstream buf;
    write_trte(buf, t);
    const TensorData back = read_trte(buf);
    EXPECT_EQ(back.dtype, TensorDtype::F32);
    for (std::size_t i = 0; i < t.values.size(); ++i)
        EXPECT_EQ(back.values[i], static_cast<double>(static_cast<float>(t.values[i]))) << i;
}

TEST(Trte, FileRoundTrip) {
    TempDir dir;
    const std::string path = dir.file("t.trte");
    write_trte_file(path, sample_tensor(TensorDtype::F64));
    const TensorData back = read_trte_file(path);
    EXPECT_EQ(back.dims, (std::vector<std::uint64_t>{2, 3}));
    EXPECT_THROW(read_trte_file(dir.file("absent.trte")), std::runtime_error);
}

std::string valid_trte_bytes() {
    std::stringstream buf;
    write_trte(buf, sample_tensor(TensorDtype::F64));
    return buf.str();
}

void expect_read_error(std::string bytes, const std::string& needle) {
    std::istringstream is(std::move(bytes));
    try {
        read_trte(is);
        FAIL() << "expected failure mentioning '" << needle << "'";
    } catch (const std::exception& e) {
        EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
}

TEST(Trte, RejectsCorruptStreams) {
    std::string bytes = valid_trte_bytes();
    std::string bad_magic = bytes;
    bad_magic[0] = 'X';
    expect_read_error(bad_magic, "bad magic");

    std::string bad_version = bytes;
    bad_version[4] = 0x02;
    expect_read_error(bad_version, "unsupported version");

    std::string bad_dtype = bytes;
    bad_dtype[5] = 0x03;
    expect_read_error(bad_dtype, "unknown dtype");

    expect_read_error(bytes.substr(0, 10), "truncated");
    expect_read_error(bytes.substr(0, bytes.size() - 3), "truncated");
}

TEST(Trte, WriteChecksElementCount) {
    TensorData t = sample_tensor(TensorDtype::F64);
    t.values.pop_back();
    std::stringstream buf;
    EXPECT_THROW(write_trte(buf, t), std::runtime_error);
}

TEST(Trte, StreamedChunksMatchOneShotBytes) {
    const TensorData t = sample_tensor(TensorDtype::F64);
    std::stringstream whole;
    write_trte(whole, t);

    std::stringstream chunked;
    write_trte_header(chunked, t.dtype, t.dims);
    write_trte_payload(chunked, t.dtype, t.values.data(), 4);
    write_trte_payload(chunked, t.dtype, t.values.data() + 4, t.values.size() - 4);
    EXPECT_EQ(whole.str(), chunked.str());
}

TEST(Checkpoint, WritesManifestPlusSiblingBinary) {
    TempDir dir;
    std::mt19937_64 rng(71);
    const Mat w = testutil::randu_mat(rng, 3, 2);
    const Mat b = testutil::randu_mat(rng, 1, 2);
    const std::string path = dir.file("ck.json");
    write_checkpoint(path, {{"backbone", "mlp"}}, {"w", "b"}, {&w, &b});

    EXPECT_TRUE(std::filesystem::exists(dir.file("ck.bin")));
    const Checkpoint ck = read_checkpoint(path);
    EXPECT_EQ(ck.meta.at("backbone").get<std::string>(), "mlp");
    ASSERT_EQ(ck.tensors.size(), 2u);
    EXPECT_EQ(ck.tensors[0].first, "w");
    EXPECT_TRUE(testutil::bit_equal(ck.tensor("w"), w));
    EXPECT_TRUE(testutil::bit_equal(ck.tensor("b"), b));
    EXPECT_THROW(ck.tensor("nope"), std::runtime_error);
}

TEST(Checkpoint, SaveThenApplyReproducesTheModel) {
    TempDir dir;
    const MlpConfig cfg{{3, 5, 2}, 1};
    Mlp trained(cfg);
    const std::string path = dir.file("model.json");
    save_model(trained, {{"embed", "t2v"}}, path);

    Mlp fresh(MlpConfig{{3, 5, 2}, 99});
    std::mt19937_64 rng(72);
    const Mat X = testutil::randu_mat(rng, 4, 3);
    ASSERT_FALSE(testutil::bit_equal(fresh.forward(X), trained.forward(X)));

    apply_checkpoint(fresh, read_checkpoint(path));
    EXPECT_TRUE(testutil::bit_equal(fresh.forward(X), trained.forward(X)));
}

TEST(Checkpoint, ApplyRejectsMismatchedModels) {
    TempDir dir;
    Mlp trained(MlpConfig{{3, 5, 2}, 1});
    const std::string path = dir.file("model.json");
    save_model(trained, {}, path);
    const Checkpoint ck = read_checkpoint(path);

    Mlp deeper(MlpConfig{{3, 5, 5, 2}, 0});
    EXPECT_THROW(apply_checkpoint(deeper, ck), std::runtime_error);  // tensor count
    Mlp wider(MlpConfig{{3, 6, 2}, 0});
    EXPECT_THROW(apply_checkpoint(wider, ck), std::runtime_error);  // shapes

    Checkpoint renamed = ck;
    renamed.tensors[0].first = "layerX.weight";
    Mlp same(MlpConfig{{3, 5, 2}, 0});
    EXPECT_THROW(apply_checkpoint(same, renamed), std::runtime_error);  // names
}

TEST(Checkpoint, ReadValidatesManifest) {
    TempDir dir;
    const std::string path = dir.file("bad.json");
    testutil::write_text(path, "{\"format\": \"something-else\"}");
    EXPECT_THROW(read_checkpoint(path), std::runtime_error);
    testutil::write_text(path, "{\"format\": \"treg-checkpoint\"}");
    EXPECT_THROW(read_checkpoint(path), std::runtime_error);  // no data_file/tensors
    testutil::write_text(path, "not json at all");
    EXPECT_THROW(read_checkpoint(path), std::runtime_error);
    EXPECT_THROW(read_checkpoint(dir.file("absent.json")), std::runtime_error);
}

}  // namespace
}  // namespace treg
