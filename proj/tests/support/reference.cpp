#include "reference.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <sys/wait.h>
#include <unistd.h>

namespace bassist::testing {

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

struct CommandResult {
  int status = -1;
  std::string output;
};

CommandResult run(const std::string& command) {
  CommandResult result;
  FILE* pipe = popen(command.c_str(), "r");
  if (pipe == nullptr) throw std::runtime_error("popen failed: " + command);
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) result.output.append(buf, n);
  const int raw = pclose(pipe);
  result.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return result;
}

}  // namespace

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  std::random_device rd;
  path_ = std::filesystem::temp_directory_path() /
          ("bassist-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" +
           std::to_string(rd()));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::filesystem::path TempDir::write(const std::string& relative, const std::string& bytes) const {
  const auto full = path_ / relative;
  std::filesystem::create_directories(full.parent_path());
  std::ofstream out(full, std::ios::binary | std::ios::trunc);
  out << bytes;
  if (!out) throw std::runtime_error("cannot write " + full.string());
  return full;
}

std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string reference_diff(const diff::FileContent& base, const diff::FileContent& modified,
                           const std::string& path, int context) {
  TempDir dir;
  const auto a = dir.write("base", base.to_bytes());
  const auto b = dir.write("modified", modified.to_bytes());
  const auto result = run("diff -U" + std::to_string(context) + " --label " +
                          shell_quote("a/" + path) + " --label " + shell_quote("b/" + path) +
                          " " + shell_quote(a.string()) + " " + shell_quote(b.string()));
  if (result.status != 0 && result.status != 1) throw std::runtime_error("diff failed");
  return result.output;
}

std::optional<std::string> reference_patch(const std::string& base_bytes,
                                           const std::string& diff_text) {
  TempDir dir;
  const auto target = dir.write("target", base_bytes);
  const auto patch_file = dir.write("change.diff", diff_text);
  const auto result = run("patch --quiet --force --fuzz=0 --no-backup-if-mismatch -r - " +
                          shell_quote(target.string()) + " " + shell_quote(patch_file.string()) +
                          " 2>&1");
  if (result.status != 0) return std::nullopt;
  return read_bytes(target);
}

}  // namespace bassist::testing
