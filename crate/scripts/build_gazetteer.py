#!/usr/bin/env python3
"""Regenerate data/gazetteer.csv.

Country rows come from ISO 3166-1 (pycountry) minus uninhabited and
external territories; cities, states and aliases are listed below.
Rows are ordered cities/regions first, then countries, each group by
descending pattern length so longer names win over their substrings.
"""

import csv
import sys
import unicodedata
from pathlib import Path

import pycountry

EXCLUDED = set("AQ BV HM TF UM IO GS CC CX NF PN SJ".split())

DISPLAY = {
    "BQ": "Bonaire, Sint Eustatius and Saba",
    "CD": "Democratic Republic of the Congo",
    "FK": "Falkland Islands",
    "FM": "Micronesia",
    "MF": "Saint Martin",
    "PS": "Palestine",
    "SH": "Saint Helena",
    "SX": "Sint Maarten",
    "VA": "Vatican City",
    "VG": "British Virgin Islands",
    "VI": "US Virgin Islands",
    "RU": "Russia",
    "BN": "Brunei",
}

# extra country-level patterns
ALIASES = {
    "US": ["usa", "united states of america", r"u\.s\.a\.?", r"u\.s\.", "estados unidos", "eeuu"],
    "GB": ["uk", "england", "scotland", "wales", "great britain", "britain", "northern ireland", r"u\.k\."],
    "BQ": ["bonaire", "sint eustatius", "saba"],
    "CD": ["dr congo", "drc", "congo-kinshasa"],
    "CG": ["congo-brazzaville", "republic of the congo"],
    "FM": ["federated states of micronesia"],
    "SH": ["ascension island", "tristan da cunha"],
    "VA": ["vatican", "holy see"],
    "RU": ["russian federation", "россия"],
    "BN": ["brunei darussalam"],
    "TR": ["turkey"],
    "CI": ["ivory coast"],
    "CV": ["cape verde"],
    "CZ": ["czech republic"],
    "SZ": ["swaziland"],
    "MK": ["macedonia"],
    "MM": ["burma"],
    "KR": ["korea", "republic of korea", "대한민국"],
    "KP": ["dprk"],
    "BR": ["brasil"],
    "ES": ["españa"],
    "DE": ["deutschland"],
    "IT": ["italia"],
    "JP": ["nippon", "日本"],
    "NL": ["holland", "nederland"],
    "SA": ["ksa", "saudi"],
    "AE": ["uae", "emirates"],
    "PH": ["pilipinas"],
    "MX": ["mexique"],
    "CH": ["schweiz", "suisse", "svizzera"],
    "AT": ["österreich"],
    "BE": ["belgique", "belgië"],
    "PL": ["polska"],
    "GR": ["hellas", "ελλάδα"],
    "IR": ["persia"],
    "LA": ["lao pdr"],
    "SY": ["syrian arab republic"],
    "TZ": ["united republic of tanzania"],
    "VN": ["viet nam"],
    "MO": ["macau"],
    "TL": ["east timor"],
    "CN": ["中国"],
    "TH": ["ประเทศไทย"],
}

US_STATES = [
    "Alabama", "Alaska", "Arizona", "Arkansas", "California", "Colorado", "Connecticut",
    "Delaware", "Florida", "Hawaii", "Idaho", "Illinois", "Indiana", "Iowa", "Kansas",
    "Kentucky", "Louisiana", "Maine", "Maryland", "Massachusetts", "Michigan", "Minnesota",
    "Mississippi", "Missouri", "Montana", "Nebraska", "Nevada", "New Hampshire", "New Jersey",
    "New Mexico", "New York", "North Carolina", "North Dakota", "Ohio", "Oklahoma", "Oregon",
    "Pennsylvania", "Rhode Island", "South Carolina", "South Dakota", "Tennessee", "Texas",
    "Utah", "Vermont", "Virginia", "Washington", "West Virginia", "Wisconsin", "Wyoming",
    "District of Columbia",
]

CA_PROVINCES = [
    "Ontario", "Quebec", "British Columbia", "Alberta", "Manitoba", "Saskatchewan",
    "Nova Scotia", "New Brunswick", "Newfoundland",
]

CITIES = {
    "US": ["New York City", "NYC", "Los Angeles", "Chicago", "Houston", "Phoenix", "Philadelphia",
           "San Antonio", "San Diego", "Dallas", "Austin", "Seattle", "Boston", "Miami", "Atlanta",
           "Denver", "Las Vegas", "Detroit", "San Francisco", "Brooklyn", "Nashville", "Portland",
           "Baltimore", "Honolulu", "New Orleans"],
    "GB": ["London", "Manchester", "Birmingham", "Liverpool", "Glasgow", "Edinburgh", "Cardiff",
           "Belfast", "Leeds", "Bristol", "Newcastle"],
    "CA": ["Toronto", "Montreal", "Vancouver", "Ottawa", "Calgary", "Edmonton", "Winnipeg"],
    "AU": ["Sydney", "Melbourne", "Brisbane", "Perth", "Adelaide", "Canberra"],
    "NZ": ["Auckland", "Wellington", "Christchurch"],
    "IE": ["Dublin", "Cork"],
    "FR": ["Paris", "Marseille", "Lyon", "Toulouse", "Bordeaux", "Lille"],
    "DE": ["Berlin", "Munich", "München", "Hamburg", "Frankfurt", "Cologne", "Köln", "Stuttgart"],
    "ES": ["Madrid", "Barcelona", "Valencia", "Sevilla", "Seville", "Bilbao", "Málaga", "Zaragoza"],
    "IT": ["Rome", "Roma", "Milan", "Milano", "Naples", "Napoli", "Turin", "Torino", "Florence", "Firenze"],
    "PT": ["Lisbon", "Lisboa", "Porto"],
    "NL": ["Amsterdam", "Rotterdam", "The Hague", "Utrecht"],
    "BE": ["Brussels", "Bruxelles", "Antwerp"],
    "AT": ["Vienna", "Wien"],
    "CH": ["Zurich", "Geneva", "Genève", "Bern", "Basel"],
    "SE": ["Stockholm", "Gothenburg"],
    "NO": ["Oslo", "Bergen"],
    "DK": ["Copenhagen", "København"],
    "FI": ["Helsinki"],
    "IS": ["Reykjavik"],
    "PL": ["Warsaw", "Warszawa", "Kraków"],
    "CZ": ["Prague", "Praha"],
    "HU": ["Budapest"],
    "RO": ["Bucharest", "București"],
    "GR": ["Athens", "Thessaloniki"],
    "TR": ["Istanbul", "Ankara", "Izmir"],
    "RU": ["Moscow", "Москва", "Saint Petersburg", "St Petersburg"],
    "UA": ["Kyiv", "Kiev", "Kharkiv", "Odesa"],
    "BY": ["Minsk"],
    "RS": ["Belgrade"],
    "HR": ["Zagreb"],
    "EG": ["Cairo", "Alexandria"],
    "MA": ["Casablanca", "Rabat", "Marrakech"],
    "DZ": ["Algiers"],
    "TN": ["Tunis"],
    "SD": ["Khartoum"],
    "ET": ["Addis Ababa"],
    "KE": ["Nairobi", "Mombasa"],
    "UG": ["Kampala"],
    "RW": ["Kigali"],
    "TZ": ["Dar es Salaam", "Dodoma"],
    "ZA": ["Johannesburg", "Cape Town", "Durban", "Pretoria"],
    "GH": ["Accra", "Kumasi"],
    "NG": ["Lagos", "Abuja", "Kano", "Ibadan", "Port Harcourt"],
    "SN": ["Dakar"],
    "CI": ["Abidjan"],
    "ML": ["Bamako"],
    "BF": ["Ouagadougou"],
    "NE": ["Niamey"],
    "GN": ["Conakry"],
    "SL": ["Freetown"],
    "LR": ["Monrovia"],
    "GW": ["Bissau"],
    "AO": ["Luanda"],
    "CD": ["Kinshasa", "Lubumbashi"],
    "CG": ["Brazzaville"],
    "ZW": ["Harare"],
    "ZM": ["Lusaka"],
    "MZ": ["Maputo"],
    "MG": ["Antananarivo"],
    "MW": ["Lilongwe", "Blantyre"],
    "BW": ["Gaborone"],
    "NA": ["Windhoek"],
    "SO": ["Mogadishu"],
    "ER": ["Asmara"],
    "SS": ["Juba"],
    "TD": ["N'Djamena"],
    "CF": ["Bangui"],
    "CM": ["Yaoundé", "Douala"],
    "GA": ["Libreville"],
    "BI": ["Bujumbura", "Gitega"],
    "LS": ["Maseru"],
    "MR": ["Nouakchott"],
    "GM": ["Banjul"],
    "TG": ["Lomé"],
    "BJ": ["Cotonou", "Porto-Novo"],
    "YE": ["Sanaa", "Aden"],
    "JP": ["Tokyo", "東京", "Osaka", "大阪", "Kyoto", "Yokohama", "Nagoya", "Sapporo", "Fukuoka"],
    "KR": ["Seoul", "서울", "Busan", "Incheon"],
    "CN": ["Beijing", "Shanghai", "Guangzhou", "Shenzhen", "北京", "上海"],
    "TW": ["Taipei", "台北", "Kaohsiung"],
    "HK": ["Kowloon"],
    "PH": ["Manila", "Quezon City", "Cebu", "Davao", "Makati"],
    "TH": ["Bangkok", "กรุงเทพ", "Chiang Mai", "Phuket"],
    "VN": ["Hanoi", "Ho Chi Minh City", "Saigon"],
    "KH": ["Phnom Penh"],
    "LA": ["Vientiane"],
    "MM": ["Yangon", "Naypyidaw"],
    "MY": ["Kuala Lumpur", "Penang"],
    "ID": ["Jakarta", "Bandung", "Surabaya", "Bali", "Yogyakarta", "Medan"],
    "IN": ["New Delhi", "Delhi", "Mumbai", "Bombay", "Bengaluru", "Bangalore", "Chennai", "Kolkata",
           "Hyderabad", "Pune", "Ahmedabad"],
    "PK": ["Karachi", "Lahore", "Islamabad"],
    "BD": ["Dhaka"],
    "LK": ["Colombo"],
    "NP": ["Kathmandu"],
    "AF": ["Kabul"],
    "IR": ["Tehran"],
    "IQ": ["Baghdad"],
    "SA": ["Riyadh", "Jeddah", "Mecca", "الرياض"],
    "AE": ["Dubai", "Abu Dhabi"],
    "QA": ["Doha"],
    "BH": ["Manama"],
    "OM": ["Muscat"],
    "KW": ["Kuwait City"],
    "JO": ["Amman"],
    "LB": ["Beirut"],
    "SY": ["Damascus", "Aleppo"],
    "IL": ["Tel Aviv", "Haifa"],
    "UZ": ["Tashkent"],
    "KZ": ["Almaty", "Astana"],
    "KG": ["Bishkek"],
    "TJ": ["Dushanbe"],
    "TM": ["Ashgabat"],
    "MN": ["Ulaanbaatar"],
    "AZ": ["Baku"],
    "AM": ["Yerevan"],
    "GE": ["Tbilisi"],
    "MX": ["Mexico City", "Ciudad de México", "CDMX", "Monterrey", "Guadalajara", "Puebla", "Tijuana", "Cancún"],
    "AR": ["Buenos Aires", "Mendoza"],
    "BR": ["São Paulo", "Rio de Janeiro", "Brasília", "Belo Horizonte", "Recife", "Fortaleza",
           "Curitiba", "Porto Alegre", "Manaus"],
    "VE": ["Caracas", "Maracaibo", "Barquisimeto"],
    "CO": ["Bogotá", "Medellín", "Barranquilla", "Cartagena"],
    "PE": ["Lima", "Arequipa", "Cusco"],
    "CL": ["Santiago", "Valparaíso"],
    "BO": ["La Paz", "Santa Cruz de la Sierra"],
    "PY": ["Asunción"],
    "UY": ["Montevideo"],
    "EC": ["Quito", "Guayaquil"],
    "NI": ["Managua"],
    "HN": ["Tegucigalpa", "San Pedro Sula"],
    "SV": ["San Salvador"],
    "GT": ["Guatemala City"],
    "CU": ["Havana", "La Habana"],
    "DO": ["Santo Domingo"],
    "HT": ["Port-au-Prince"],
    "JM": ["Kingston"],
    "TT": ["Port of Spain"],
    "PR": ["San Juan"],
}


def norm(s):
    s = unicodedata.normalize("NFD", s.lower())
    s = "".join(c for c in s if not unicodedata.combining(c))
    return unicodedata.normalize("NFC", s)


def main(out):
    names = {}
    for c in pycountry.countries:
        if c.alpha_2 in EXCLUDED:
            continue
        names[c.alpha_2] = DISPLAY.get(c.alpha_2) or getattr(c, "common_name", None) or c.name
    assert len(names) == 237, len(names)

    regional = []
    for s in US_STATES:
        regional.append((s, "US", None))
    for p in CA_PROVINCES:
        regional.append((p, "CA", None))
    for iso, cities in CITIES.items():
        for city in cities:
            regional.append((city, iso, city))

    national = []
    for iso, name in names.items():
        national.append((name, iso, None))
        for alias in ALIASES.get(iso, []):
            national.append((alias, iso, None))

    seen = set()
    for pattern, _, _ in regional + national:
        key = norm(pattern)
        if key in seen:
            sys.exit(f"duplicate pattern {pattern!r}")
        seen.add(key)

    def order(rows):
        return sorted(rows, key=lambda r: (-len(norm(r[0])), norm(r[0])))

    with open(out, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["pattern", "country", "city", "country_iso"])
        for pattern, iso, city in order(regional) + order(national):
            w.writerow([pattern, names[iso], city or "", iso])


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data" / "gazetteer.csv")
