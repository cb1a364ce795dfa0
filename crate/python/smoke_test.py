"""Smoke test for the sumsetlab extension module: python python/smoke_test.py"""

import sumsetlab as sl


def main():
    g = sl.Group("Z6")
    assert g.size == 6 and str(g) == "Z6"
    assert sl.Group("Z2xZ3").element(4) == [0, 2]

    assert sl.sumset(g, "{0,2,4}", "{0,2,4}") == [0, 2, 4]
    assert sl.steinhaus_level_set(g, "{0,1}", "{0,3}") == [0, 1, 3, 4]
    cert = sl.kneser_certificate(g, "{0,2,4}", "{0,2,4}")
    assert cert["stabilizer"] == [0, 2, 4]

    # indicator of {0} has flat spectrum 1/|G|
    spec = sl.dft(g, [1, 0, 0, 0, 0, 0])
    assert all(abs(z - 1 / 6) < 1e-12 for z in spec)
    conv = sl.convolve(g, [1, 1, 0, 0, 0, 0], [1, 0, 0, 0, 0, 0])
    assert abs(conv[1] - 1 / 6) < 1e-12 and abs(conv[2]) < 1e-12

    assert sl.members("mod(3,1)", -5, 5) == [-5, -2, 1, 4]
    b = sl.BohrSpec("bohr(theta=1/3;eps=0.1)")
    assert b.contains(3) and not b.contains(1)
    assert abs(b.density_lower_bound() - 1 / 11) < 1e-12

    assert abs(sl.weyl_average("identity", "1/2", 1001)) <= 1 / 1001
    c = sl.mean_coefficient("mod(4,1)", "1/4", 4000)
    assert abs(c - (-0.25j)) < 1e-12, c

    a, bs = sl.example_parameters()
    assert a[:3] == [10, 57, 648] and bs[:3] == [19, 108, 1231]

    report = sl.run("group kneser", {"group": "Z6", "a": "{0,2,4}", "b": "{0,2,4}"})
    assert report["result"]["stabilizer"] == [0, 2, 4]

    try:
        sl.Group("Z0")
    except sl.SumsetLabError:
        pass
    else:
        raise AssertionError("Z0 accepted")

    print("sumsetlab", sl.__version__, "smoke test ok")


if __name__ == "__main__":
    main()
