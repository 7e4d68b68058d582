// Helpers for driving the CLI binary as a subprocess and comparing the files
// it writes. TWINFOCK_CLI_PATH is injected by CMake.

#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

namespace cli {

inline std::string binary_path() {
#ifdef TWINFOCK_CLI_PATH
  return TWINFOCK_CLI_PATH;
#else
  throw std::runtime_error("TWINFOCK_CLI_PATH not defined");
#endif
}

// Fresh scratch directory under the system temp root, removed on destruction.
struct ScratchDir {
  std::filesystem::path path;

  explicit ScratchDir(const std::string& tag) {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("twinfock_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string str(const std::string& rel = "") const {
    return rel.empty() ? path.string() : (path / rel).string();
  }
};

// Runs `twinfock <args>` with stdout/stderr captured into files inside dir.
// Returns the process exit code (or -1 if it did not exit normally).
inline int run(const std::string& args, const ScratchDir& dir, const std::string& log_tag = "cli") {
  const std::string command = binary_path() + " " + args + " > " + dir.str(log_tag + ".out") +
                              " 2> " + dir.str(log_tag + ".err");
  const int status = std::system(command.c_str());
  if (status == -1 || !WIFEXITED(status)) return -1;
  return WEXITSTATUS(status);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

}  // namespace cli
