#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace annotary::support {

struct ProcessError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Run to completion, feeding stdin_data and capturing stdout/stderr.
RunResult run_process(const std::vector<std::string>& argv, const std::string& stdin_data = "");

// A long-lived child with line-oriented stdin/stdout pipes.
class PipeProcess {
 public:
  explicit PipeProcess(const std::vector<std::string>& argv);
  ~PipeProcess();
  PipeProcess(const PipeProcess&) = delete;
  PipeProcess& operator=(const PipeProcess&) = delete;

  bool alive() const;
  void write_line(const std::string& line);  // appends '\n'
  // Reads one line; throws ProcessError on EOF/death.
  std::string read_line();

 private:
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

}  // namespace annotary::support
