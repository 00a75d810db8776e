#include <gtest/gtest.h>

#include <bit>
#include <filesystem>
#include <limits>

#include "topicsent/checkpoint.hpp"
#include "topicsent/textio.hpp"

using namespace topicsent;

TEST(Checkpoint, TensorRoundTripIsBitExact) {
  Checkpoint c;
  const Tensor t({2, 3}, std::vector<double>{0.1, -1e-300, 3.0, std::numeric_limits<double>::max(),
                                             -0.0, 1.0 / 3.0});
  c.put_tensor("w", t);
  const auto back = Checkpoint::parse(c.dump());
  const Tensor r = back.tensor("w");
  EXPECT_EQ(r.shape(), t.shape());
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_EQ(std::bit_cast<std::uint64_t>(r[i]), std::bit_cast<std::uint64_t>(t[i]));
  }
}

TEST(Checkpoint, ConfigTablesAndNames) {
  Checkpoint c;
  c.set_config("model", {{"layers", 2}});
  c.put_table("vocab", StringIndex({{"a", 3}, {"b", 1}}));
  c.put_tensor("z", Tensor::vector({1}));
  c.put_tensor("a", Tensor::vector({2}));
  const auto back = Checkpoint::parse(c.dump());
  EXPECT_EQ(back.config("model").at("layers"), 2);
  EXPECT_TRUE(back.has_table("vocab"));
  EXPECT_EQ(back.table("vocab").at(1), "b");
  EXPECT_EQ(back.tensor_names(), (std::vector<std::string>{"a", "z"}));
  EXPECT_FALSE(back.has_tensor("missing"));
  EXPECT_THROW(back.tensor("missing"), CheckpointError);
  EXPECT_THROW(back.config("missing"), CheckpointError);
}

TEST(Checkpoint, DumpIsDeterministicAndVersioned) {
  Checkpoint a, b;
  a.put_tensor("x", Tensor::vector({1, 2}));
  a.set_config("k", {{"v", 1}});
  b.set_config("k", {{"v", 1}});
  b.put_tensor("x", Tensor::vector({1, 2}));
  EXPECT_EQ(a.dump(), b.dump());
  EXPECT_NE(a.dump().find("\"format_version\": 1"), std::string::npos);
  auto doc = a.dump();
  doc.replace(doc.find("\"format_version\": 1"), 19, "\"format_version\": 9");
  EXPECT_THROW(Checkpoint::parse(doc), CheckpointError);
  EXPECT_THROW(Checkpoint::parse("not json"), CheckpointError);
}

TEST(Checkpoint, MergeAndFiles) {
  Checkpoint a, b;
  a.put_tensor("x", Tensor::vector({1}));
  b.put_tensor("y", Tensor::vector({2}));
  a.merge(b);
  EXPECT_TRUE(a.has_tensor("y"));
  const auto path = std::filesystem::temp_directory_path() / "topicsent_ckpt_test" / "c.json";
  a.save(path);
  EXPECT_EQ(Checkpoint::load(path).dump(), a.dump());
  std::filesystem::remove_all(path.parent_path());
  EXPECT_THROW(Checkpoint::load(path), CheckpointError);
}

TEST(TextIo, Base64AndSha) {
  EXPECT_EQ(textio::base64_encode("hello"), "aGVsbG8=");
  EXPECT_EQ(textio::base64_decode("aGVsbG8="), "hello");
  EXPECT_EQ(textio::base64_decode(textio::base64_encode(std::string("\0\1\2", 3))),
            std::string("\0\1\2", 3));
  EXPECT_EQ(textio::sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(TextIo, DoubleFormattingRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 123456789.0}) {
    EXPECT_EQ(textio::parse_double(textio::format_double(v)), v);
  }
  EXPECT_THROW(textio::parse_double("abc"), std::invalid_argument);
}
