#include "annotary/support/subprocess.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace annotary::support {

namespace {

[[noreturn]] void exec_child(const std::vector<std::string>& argv) {
  std::vector<char*> cargv;
  for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);
  execvp(cargv[0], cargv.data());
  _exit(127);
}

}  // namespace

RunResult run_process(const std::vector<std::string>& argv, const std::string& stdin_data) {
  if (argv.empty()) throw ProcessError("empty argv");
  int in_pipe[2], out_pipe[2], err_pipe[2];
  if (pipe(in_pipe) || pipe(out_pipe) || pipe(err_pipe))
    throw ProcessError("pipe() failed");

  pid_t pid = fork();
  if (pid < 0) throw ProcessError("fork() failed");
  if (pid == 0) {
    dup2(in_pipe[0], 0);
    dup2(out_pipe[1], 1);
    dup2(err_pipe[1], 2);
    close(in_pipe[0]); close(in_pipe[1]);
    close(out_pipe[0]); close(out_pipe[1]);
    close(err_pipe[0]); close(err_pipe[1]);
    exec_child(argv);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  close(err_pipe[1]);

  size_t written = 0;
  while (written < stdin_data.size()) {
    ssize_t n = write(in_pipe[1], stdin_data.data() + written, stdin_data.size() - written);
    if (n <= 0) break;
    written += static_cast<size_t>(n);
  }
  close(in_pipe[1]);

  RunResult res;
  char buf[4096];
  // Drain stdout then stderr; fine for the output sizes involved here.
  ssize_t n;
  while ((n = read(out_pipe[0], buf, sizeof buf)) > 0) res.out.append(buf, n);
  close(out_pipe[0]);
  while ((n = read(err_pipe[0], buf, sizeof buf)) > 0) res.err.append(buf, n);
  close(err_pipe[0]);

  int status = 0;
  waitpid(pid, &status, 0);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

PipeProcess::PipeProcess(const std::vector<std::string>& argv) {
  if (argv.empty()) throw ProcessError("empty argv");
  int in_pipe[2], out_pipe[2];
  if (pipe(in_pipe) || pipe(out_pipe)) throw ProcessError("pipe() failed");
  pid_t pid = fork();
  if (pid < 0) throw ProcessError("fork() failed");
  if (pid == 0) {
    dup2(in_pipe[0], 0);
    dup2(out_pipe[1], 1);
    close(in_pipe[0]); close(in_pipe[1]);
    close(out_pipe[0]); close(out_pipe[1]);
    exec_child(argv);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

PipeProcess::~PipeProcess() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  if (pid_ > 0) {
    kill(pid_, SIGTERM);
    int status = 0;
    waitpid(pid_, &status, 0);
  }
}

bool PipeProcess::alive() const {
  if (pid_ <= 0) return false;
  return kill(pid_, 0) == 0;
}

void PipeProcess::write_line(const std::string& line) {
  std::string data = line + "\n";
  size_t written = 0;
  while (written < data.size()) {
    ssize_t n = write(to_child_, data.data() + written, data.size() - written);
    if (n <= 0) throw ProcessError("write to child failed: " + std::string(strerror(errno)));
    written += static_cast<size_t>(n);
  }
}

std::string PipeProcess::read_line() {
  for (;;) {
    auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    char buf[4096];
    ssize_t n = read(from_child_, buf, sizeof buf);
    if (n <= 0) throw ProcessError("child closed its output pipe");
    buffer_.append(buf, n);
  }
}

}  // namespace annotary::support
