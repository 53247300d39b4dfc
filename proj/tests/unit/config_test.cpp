#include <gtest/gtest.h>

#include "bassist/config_file.hpp"
#include "bassist/error.hpp"

namespace bassist::config {
namespace {

TEST(ConfigFile, ValueKinds) {
  const auto doc = parse(
      "a = 12\n"
      "b = 1_000\n"
      "c = true\n"
      "d = \"x \\\"q\\\" \\n\"  # trailing comment\n"
      "e = 'lit\\eral'\n"
      "f = [\"one\", 'two', ]\n"
      "g = []\n"
      "h = -4\n"
      "\n"
      "[sec]\n"
      "k = \"v\"\n",
      ErrorCode::kConfigInvalid);
  EXPECT_EQ(std::get<long long>(doc.root.at("a")), 12);
  EXPECT_EQ(std::get<long long>(doc.root.at("b")), 1000);
  EXPECT_EQ(std::get<bool>(doc.root.at("c")), true);
  EXPECT_EQ(std::get<std::string>(doc.root.at("d")), "x \"q\" \n");
  EXPECT_EQ(std::get<std::string>(doc.root.at("e")), "lit\\eral");
  EXPECT_EQ(std::get<std::vector<std::string>>(doc.root.at("f")),
            (std::vector<std::string>{"one", "two"}));
  EXPECT_TRUE(std::get<std::vector<std::string>>(doc.root.at("g")).empty());
  EXPECT_EQ(std::get<long long>(doc.root.at("h")), -4);
  EXPECT_EQ(std::get<std::string>(doc.sections.at("sec").at("k")), "v");
}

TEST(ConfigFile, ErrorsUseRequestedCode) {
  const std::vector<std::string> bad = {
      "a = \n", "= 1\n", "a = \"open\n", "a = [1, 2]\n", "a = 1\na = 2\n",
      "[s]\n[s]\n", "[bad section\n", "a = 99999999999999999999999\n", "a = tru\n", "a b = 1\n"};
  for (const auto& text : bad) {
    try {
      (void)parse(text, ErrorCode::kPolicyInvalid);
      ADD_FAILURE() << "accepted: " << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kPolicyInvalid) << text;
    }
  }
}

TEST(ConfigFile, HashInsideStringIsNotComment) {
  const auto doc = parse("a = \"x # y\"\n", ErrorCode::kConfigInvalid);
  EXPECT_EQ(std::get<std::string>(doc.root.at("a")), "x # y");
}

}  // namespace
}  // namespace bassist::config
