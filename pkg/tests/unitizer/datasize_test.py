from unittest import TestCase

from core.errors import ConfigError
from unitizer.datasize import bits_per_cluster, data_size_bits, parse_format


class DataSizeTest(TestCase):

    def test_waveform_is_16_bit_16_khz(self) -> None:
        self.assertEqual(data_size_bits("waveform", 1.0).bits_per_second, 256_000)

    def test_ssl_features(self) -> None:
        size = data_size_bits("ssl", 1.0)
        self.assertEqual(size.bits_per_second, 1_638_400)
        self.assertAlmostEqual(size.ratio_to_waveform, 6.4)

    def test_units(self) -> None:
        self.assertEqual(data_size_bits("units(100)", 1.0).bits_per_second, 350)
        self.assertEqual(data_size_bits("units", 1.0, clusters = 1000).bits_per_second, 500)

    def test_unit_rate_relative_to_waveform(self) -> None:
        self.assertAlmostEqual(data_size_bits("units(1000)", 3.0).ratio_to_waveform, 2e-3, delta = 1e-4)

    def test_totals_scale_with_duration(self) -> None:
        size = data_size_bits("units:100", 2.5)
        self.assertEqual(size.bits, 875)
        self.assertEqual(size.format, "units(100)")
        self.assertEqual(data_size_bits("waveform", 0.0).bits, 0)

    def test_bits_per_cluster(self) -> None:
        self.assertEqual(bits_per_cluster(1), 0)
        self.assertEqual(bits_per_cluster(2), 1)
        self.assertEqual(bits_per_cluster(100), 7)
        self.assertEqual(bits_per_cluster(1024), 10)
        with self.assertRaises(ConfigError):
            bits_per_cluster(0)

    def test_parse_format(self) -> None:
        self.assertEqual(parse_format(" SSL "), ("ssl", None))
        self.assertEqual(parse_format("units(50)"), ("units", 50))
        with self.assertRaises(ConfigError):
            parse_format("mel")

    def test_invalid_requests(self) -> None:
        with self.assertRaises(ConfigError):
            data_size_bits("waveform", -1.0)
        with self.assertRaises(ConfigError):
            data_size_bits("units", 1.0)


if __name__ == "__main__":
    from unittest import main
    main()
