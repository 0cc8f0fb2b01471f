#include "newsseg/cli.hpp"

int main(int argc, char** argv) {
  return newsseg::cli::run(argc, argv);
}
