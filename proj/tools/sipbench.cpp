#include "sip/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sip::cli::dispatch(std::move(args));
}
