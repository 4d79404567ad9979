#include "nlk/cli.hpp"

int main(int argc, char** argv)
{
    return nlk::run(argc, argv);
}
