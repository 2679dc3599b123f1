//! ISO 3166-1 alpha-3 codes with English short names, plus common aliases.

/// Sorted by code.
static COUNTRIES: &[(&str, &str)] = &[
    ("ABW", "Aruba"),
    ("AFG", "Afghanistan"),
    ("AGO", "Angola"),
    ("AIA", "Anguilla"),
    ("ALA", "Åland Islands"),
    ("ALB", "Albania"),
    ("AND", "Andorra"),
    ("ARE", "United Arab Emirates"),
    ("ARG", "Argentina"),
    ("ARM", "Armenia"),
    ("ASM", "American Samoa"),
    ("ATA", "Antarctica"),
    ("ATF", "French Southern Territories"),
    ("ATG", "Antigua and Barbuda"),
    ("AUS", "Australia"),
    ("AUT", "Austria"),
    ("AZE", "Azerbaijan"),
    ("BDI", "Burundi"),
    ("BEL", "Belgium"),
    ("BEN", "Benin"),
    ("BES", "Bonaire, Sint Eustatius and Saba"),
    ("BFA", "Burkina Faso"),
    ("BGD", "Bangladesh"),
    ("BGR", "Bulgaria"),
    ("BHR", "Bahrain"),
    ("BHS", "Bahamas"),
    ("BIH", "Bosnia and Herzegovina"),
    ("BLM", "Saint Barthélemy"),
    ("BLR", "Belarus"),
    ("BLZ", "Belize"),
    ("BMU", "Bermuda"),
    ("BOL", "Bolivia, Plurinational State of"),
    ("BRA", "Brazil"),
    ("BRB", "Barbados"),
    ("BRN", "Brunei Darussalam"),
    ("BTN", "Bhutan"),
    ("BVT", "Bouvet Island"),
    ("BWA", "Botswana"),
    ("CAF", "Central African Republic"),
    ("CAN", "Canada"),
    ("CCK", "Cocos (Keeling) Islands"),
    ("CHE", "Switzerland"),
    ("CHL", "Chile"),
    ("CHN", "China"),
    ("CIV", "Côte d'Ivoire"),
    ("CMR", "Cameroon"),
    ("COD", "Congo, The Democratic Republic of the"),
    ("COG", "Congo"),
    ("COK", "Cook Islands"),
    ("COL", "Colombia"),
    ("COM", "Comoros"),
    ("CPV", "Cabo Verde"),
    ("CRI", "Costa Rica"),
    ("CUB", "Cuba"),
    ("CUW", "Curaçao"),
    ("CXR", "Christmas Island"),
    ("CYM", "Cayman Islands"),
    ("CYP", "Cyprus"),
    ("CZE", "Czechia"),
    ("DEU", "Germany"),
    ("DJI", "Djibouti"),
    ("DMA", "Dominica"),
    ("DNK", "Denmark"),
    ("DOM", "Dominican Republic"),
    ("DZA", "Algeria"),
    ("ECU", "Ecuador"),
    ("EGY", "Egypt"),
    ("ERI", "Eritrea"),
    ("ESH", "Western Sahara"),
    ("ESP", "Spain"),
    ("EST", "Estonia"),
    ("ETH", "Ethiopia"),
    ("FIN", "Finland"),
    ("FJI", "Fiji"),
    ("FLK", "Falkland Islands (Malvinas)"),
    ("FRA", "France"),
    ("FRO", "Faroe Islands"),
    ("FSM", "Micronesia, Federated States of"),
    ("GAB", "Gabon"),
    ("GBR", "United Kingdom"),
    ("GEO", "Georgia"),
    ("GGY", "Guernsey"),
    ("GHA", "Ghana"),
    ("GIB", "Gibraltar"),
    ("GIN", "Guinea"),
    ("GLP", "Guadeloupe"),
    ("GMB", "Gambia"),
    ("GNB", "Guinea-Bissau"),
    ("GNQ", "Equatorial Guinea"),
    ("GRC", "Greece"),
    ("GRD", "Grenada"),
    ("GRL", "Greenland"),
    ("GTM", "Guatemala"),
    ("GUF", "French Guiana"),
    ("GUM", "Guam"),
    ("GUY", "Guyana"),
    ("HKG", "Hong Kong"),
    ("HMD", "Heard Island and McDonald Islands"),
    ("HND", "Honduras"),
    ("HRV", "Croatia"),
    ("HTI", "Haiti"),
    ("HUN", "Hungary"),
    ("IDN", "Indonesia"),
    ("IMN", "Isle of Man"),
    ("IND", "India"),
    ("IOT", "British Indian Ocean Territory"),
    ("IRL", "Ireland"),
    ("IRN", "Iran, Islamic Republic of"),
    ("IRQ", "Iraq"),
    ("ISL", "Iceland"),
    ("ISR", "Israel"),
    ("ITA", "Italy"),
    ("JAM", "Jamaica"),
    ("JEY", "Jersey"),
    ("JOR", "Jordan"),
    ("JPN", "Japan"),
    ("KAZ", "Kazakhstan"),
    ("KEN", "Kenya"),
    ("KGZ", "Kyrgyzstan"),
    ("KHM", "Cambodia"),
    ("KIR", "Kiribati"),
    ("KNA", "Saint Kitts and Nevis"),
    ("KOR", "Korea, Republic of"),
    ("KWT", "Kuwait"),
    ("LAO", "Lao People's Democratic Republic"),
    ("LBN", "Lebanon"),
    ("LBR", "Liberia"),
    ("LBY", "Libya"),
    ("LCA", "Saint Lucia"),
    ("LIE", "Liechtenstein"),
    ("LKA", "Sri Lanka"),
    ("LSO", "Lesotho"),
    ("LTU", "Lithuania"),
    ("LUX", "Luxembourg"),
    ("LVA", "Latvia"),
    ("MAC", "Macao"),
    ("MAF", "Saint Martin (French part)"),
    ("MAR", "Morocco"),
    ("MCO", "Monaco"),
    ("MDA", "Moldova, Republic of"),
    ("MDG", "Madagascar"),
    ("MDV", "Maldives"),
    ("MEX", "Mexico"),
    ("MHL", "Marshall Islands"),
    ("MKD", "North Macedonia"),
    ("MLI", "Mali"),
    ("MLT", "Malta"),
    ("MMR", "Myanmar"),
    ("MNE", "Montenegro"),
    ("MNG", "Mongolia"),
    ("MNP", "Northern Mariana Islands"),
    ("MOZ", "Mozambique"),
    ("MRT", "Mauritania"),
    ("MSR", "Montserrat"),
    ("MTQ", "Martinique"),
    ("MUS", "Mauritius"),
    ("MWI", "Malawi"),
    ("MYS", "Malaysia"),
    ("MYT", "Mayotte"),
    ("NAM", "Namibia"),
    ("NCL", "New Caledonia"),
    ("NER", "Niger"),
    ("NFK", "Norfolk Island"),
    ("NGA", "Nigeria"),
    ("NIC", "Nicaragua"),
    ("NIU", "Niue"),
    ("NLD", "Netherlands"),
    ("NOR", "Norway"),
    ("NPL", "Nepal"),
    ("NRU", "Nauru"),
    ("NZL", "New Zealand"),
    ("OMN", "Oman"),
    ("PAK", "Pakistan"),
    ("PAN", "Panama"),
    ("PCN", "Pitcairn"),
    ("PER", "Peru"),
    ("PHL", "Philippines"),
    ("PLW", "Palau"),
    ("PNG", "Papua New Guinea"),
    ("POL", "Poland"),
    ("PRI", "Puerto Rico"),
    ("PRK", "Korea, Democratic People's Republic of"),
    ("PRT", "Portugal"),
    ("PRY", "Paraguay"),
    ("PSE", "Palestine, State of"),
    ("PYF", "French Polynesia"),
    ("QAT", "Qatar"),
    ("REU", "Réunion"),
    ("ROU", "Romania"),
    ("RUS", "Russian Federation"),
    ("RWA", "Rwanda"),
    ("SAU", "Saudi Arabia"),
    ("SDN", "Sudan"),
    ("SEN", "Senegal"),
    ("SGP", "Singapore"),
    ("SGS", "South Georgia and the South Sandwich Islands"),
    ("SHN", "Saint Helena, Ascension and Tristan da Cunha"),
    ("SJM", "Svalbard and Jan Mayen"),
    ("SLB", "Solomon Islands"),
    ("SLE", "Sierra Leone"),
    ("SLV", "El Salvador"),
    ("SMR", "San Marino"),
    ("SOM", "Somalia"),
    ("SPM", "Saint Pierre and Miquelon"),
    ("SRB", "Serbia"),
    ("SSD", "South Sudan"),
    ("STP", "Sao Tome and Principe"),
    ("SUR", "Suriname"),
    ("SVK", "Slovakia"),
    ("SVN", "Slovenia"),
    ("SWE", "Sweden"),
    ("SWZ", "Eswatini"),
    ("SXM", "Sint Maarten (Dutch part)"),
    ("SYC", "Seychelles"),
    ("SYR", "Syrian Arab Republic"),
    ("TCA", "Turks and Caicos Islands"),
    ("TCD", "Chad"),
    ("TGO", "Togo"),
    ("THA", "Thailand"),
    ("TJK", "Tajikistan"),
    ("TKL", "Tokelau"),
    ("TKM", "Turkmenistan"),
    ("TLS", "Timor-Leste"),
    ("TON", "Tonga"),
    ("TTO", "Trinidad and Tobago"),
    ("TUN", "Tunisia"),
    ("TUR", "Turkey"),
    ("TUV", "Tuvalu"),
    ("TWN", "Taiwan, Province of China"),
    ("TZA", "Tanzania, United Republic of"),
    ("UGA", "Uganda"),
    ("UKR", "Ukraine"),
    ("UMI", "United States Minor Outlying Islands"),
    ("URY", "Uruguay"),
    ("USA", "United States"),
    ("UZB", "Uzbekistan"),
    ("VAT", "Holy See (Vatican City State)"),
    ("VCT", "Saint Vincent and the Grenadines"),
    ("VEN", "Venezuela, Bolivarian Republic of"),
    ("VGB", "Virgin Islands, British"),
    ("VIR", "Virgin Islands, U.S."),
    ("VNM", "Viet Nam"),
    ("VUT", "Vanuatu"),
    ("WLF", "Wallis and Futuna"),
    ("WSM", "Samoa"),
    ("YEM", "Yemen"),
    ("ZAF", "South Africa"),
    ("ZMB", "Zambia"),
    ("ZWE", "Zimbabwe"),
];

/// Everyday names that differ from the short names above.
static ALIASES: &[(&str, &str)] = &[
    ("Arab Republic of Egypt", "EGY"),
    ("Argentine Republic", "ARG"),
    ("Bolivarian Republic of Venezuela", "VEN"),
    ("Bolivia", "BOL"),
    ("Britain", "GBR"),
    ("British Virgin Islands", "VGB"),
    ("Brunei", "BRN"),
    ("Burma", "MMR"),
    ("Cape Verde", "CPV"),
    ("Commonwealth of Dominica", "DMA"),
    ("Commonwealth of the Bahamas", "BHS"),
    ("Commonwealth of the Northern Mariana Islands", "MNP"),
    ("Congo-Brazzaville", "COG"),
    ("Congo-Kinshasa", "COD"),
    ("Czech Republic", "CZE"),
    ("DR Congo", "COD"),
    ("Democratic People's Republic of Korea", "PRK"),
    ("Democratic Republic of Sao Tome and Principe", "STP"),
    ("Democratic Republic of Timor-Leste", "TLS"),
    ("Democratic Republic of the Congo", "COD"),
    ("Democratic Socialist Republic of Sri Lanka", "LKA"),
    ("Eastern Republic of Uruguay", "URY"),
    ("England", "GBR"),
    ("Federal Democratic Republic of Ethiopia", "ETH"),
    ("Federal Democratic Republic of Nepal", "NPL"),
    ("Federal Republic of Germany", "DEU"),
    ("Federal Republic of Nigeria", "NGA"),
    ("Federal Republic of Somalia", "SOM"),
    ("Federated States of Micronesia", "FSM"),
    ("Federative Republic of Brazil", "BRA"),
    ("French Republic", "FRA"),
    ("Gabonese Republic", "GAB"),
    ("Grand Duchy of Luxembourg", "LUX"),
    ("Great Britain", "GBR"),
    ("Hashemite Kingdom of Jordan", "JOR"),
    ("Hellenic Republic", "GRC"),
    ("Holland", "NLD"),
    ("Hong Kong Special Administrative Region of China", "HKG"),
    ("Independent State of Papua New Guinea", "PNG"),
    ("Independent State of Samoa", "WSM"),
    ("Iran", "IRN"),
    ("Islamic Republic of Afghanistan", "AFG"),
    ("Islamic Republic of Iran", "IRN"),
    ("Islamic Republic of Mauritania", "MRT"),
    ("Islamic Republic of Pakistan", "PAK"),
    ("Italian Republic", "ITA"),
    ("Ivory Coast", "CIV"),
    ("Kingdom of Bahrain", "BHR"),
    ("Kingdom of Belgium", "BEL"),
    ("Kingdom of Bhutan", "BTN"),
    ("Kingdom of Cambodia", "KHM"),
    ("Kingdom of Denmark", "DNK"),
    ("Kingdom of Eswatini", "SWZ"),
    ("Kingdom of Lesotho", "LSO"),
    ("Kingdom of Morocco", "MAR"),
    ("Kingdom of Norway", "NOR"),
    ("Kingdom of Saudi Arabia", "SAU"),
    ("Kingdom of Spain", "ESP"),
    ("Kingdom of Sweden", "SWE"),
    ("Kingdom of Thailand", "THA"),
    ("Kingdom of Tonga", "TON"),
    ("Kingdom of the Netherlands", "NLD"),
    ("Korea", "KOR"),
    ("Kyrgyz Republic", "KGZ"),
    ("Laos", "LAO"),
    ("Lebanese Republic", "LBN"),
    ("Macao Special Administrative Region of China", "MAC"),
    ("Macedonia", "MKD"),
    ("Micronesia", "FSM"),
    ("Moldova", "MDA"),
    ("North Korea", "PRK"),
    ("Palestine", "PSE"),
    ("People's Democratic Republic of Algeria", "DZA"),
    ("People's Republic of Bangladesh", "BGD"),
    ("People's Republic of China", "CHN"),
    ("Plurinational State of Bolivia", "BOL"),
    ("Portuguese Republic", "PRT"),
    ("Principality of Andorra", "AND"),
    ("Principality of Liechtenstein", "LIE"),
    ("Principality of Monaco", "MCO"),
    ("Republic of Albania", "ALB"),
    ("Republic of Angola", "AGO"),
    ("Republic of Armenia", "ARM"),
    ("Republic of Austria", "AUT"),
    ("Republic of Azerbaijan", "AZE"),
    ("Republic of Belarus", "BLR"),
    ("Republic of Benin", "BEN"),
    ("Republic of Bosnia and Herzegovina", "BIH"),
    ("Republic of Botswana", "BWA"),
    ("Republic of Bulgaria", "BGR"),
    ("Republic of Burundi", "BDI"),
    ("Republic of Cabo Verde", "CPV"),
    ("Republic of Cameroon", "CMR"),
    ("Republic of Chad", "TCD"),
    ("Republic of Chile", "CHL"),
    ("Republic of Colombia", "COL"),
    ("Republic of Costa Rica", "CRI"),
    ("Republic of Croatia", "HRV"),
    ("Republic of Cuba", "CUB"),
    ("Republic of Cyprus", "CYP"),
    ("Republic of Côte d'Ivoire", "CIV"),
    ("Republic of Djibouti", "DJI"),
    ("Republic of Ecuador", "ECU"),
    ("Republic of El Salvador", "SLV"),
    ("Republic of Equatorial Guinea", "GNQ"),
    ("Republic of Estonia", "EST"),
    ("Republic of Fiji", "FJI"),
    ("Republic of Finland", "FIN"),
    ("Republic of Ghana", "GHA"),
    ("Republic of Guatemala", "GTM"),
    ("Republic of Guinea", "GIN"),
    ("Republic of Guinea-Bissau", "GNB"),
    ("Republic of Guyana", "GUY"),
    ("Republic of Haiti", "HTI"),
    ("Republic of Honduras", "HND"),
    ("Republic of Iceland", "ISL"),
    ("Republic of India", "IND"),
    ("Republic of Indonesia", "IDN"),
    ("Republic of Iraq", "IRQ"),
    ("Republic of Kazakhstan", "KAZ"),
    ("Republic of Kenya", "KEN"),
    ("Republic of Kiribati", "KIR"),
    ("Republic of Latvia", "LVA"),
    ("Republic of Liberia", "LBR"),
    ("Republic of Lithuania", "LTU"),
    ("Republic of Madagascar", "MDG"),
    ("Republic of Malawi", "MWI"),
    ("Republic of Maldives", "MDV"),
    ("Republic of Mali", "MLI"),
    ("Republic of Malta", "MLT"),
    ("Republic of Mauritius", "MUS"),
    ("Republic of Moldova", "MDA"),
    ("Republic of Mozambique", "MOZ"),
    ("Republic of Myanmar", "MMR"),
    ("Republic of Namibia", "NAM"),
    ("Republic of Nauru", "NRU"),
    ("Republic of Nicaragua", "NIC"),
    ("Republic of North Macedonia", "MKD"),
    ("Republic of Palau", "PLW"),
    ("Republic of Panama", "PAN"),
    ("Republic of Paraguay", "PRY"),
    ("Republic of Peru", "PER"),
    ("Republic of Poland", "POL"),
    ("Republic of San Marino", "SMR"),
    ("Republic of Senegal", "SEN"),
    ("Republic of Serbia", "SRB"),
    ("Republic of Seychelles", "SYC"),
    ("Republic of Sierra Leone", "SLE"),
    ("Republic of Singapore", "SGP"),
    ("Republic of Slovenia", "SVN"),
    ("Republic of South Africa", "ZAF"),
    ("Republic of South Sudan", "SSD"),
    ("Republic of Suriname", "SUR"),
    ("Republic of Tajikistan", "TJK"),
    ("Republic of Trinidad and Tobago", "TTO"),
    ("Republic of Tunisia", "TUN"),
    ("Republic of Turkey", "TUR"),
    ("Republic of Uganda", "UGA"),
    ("Republic of Uzbekistan", "UZB"),
    ("Republic of Vanuatu", "VUT"),
    ("Republic of Yemen", "YEM"),
    ("Republic of Zambia", "ZMB"),
    ("Republic of Zimbabwe", "ZWE"),
    ("Republic of the Congo", "COG"),
    ("Republic of the Gambia", "GMB"),
    ("Republic of the Marshall Islands", "MHL"),
    ("Republic of the Niger", "NER"),
    ("Republic of the Philippines", "PHL"),
    ("Republic of the Sudan", "SDN"),
    ("Russia", "RUS"),
    ("Rwandese Republic", "RWA"),
    ("Slovak Republic", "SVK"),
    ("Socialist Republic of Viet Nam", "VNM"),
    ("South Korea", "KOR"),
    ("State of Israel", "ISR"),
    ("State of Kuwait", "KWT"),
    ("State of Qatar", "QAT"),
    ("Sultanate of Oman", "OMN"),
    ("Swaziland", "SWZ"),
    ("Swiss Confederation", "CHE"),
    ("Syria", "SYR"),
    ("Taiwan", "TWN"),
    ("Tanzania", "TZA"),
    ("The Netherlands", "NLD"),
    ("Togolese Republic", "TGO"),
    ("UK", "GBR"),
    ("USA", "USA"),
    ("Union of the Comoros", "COM"),
    (
        "United Kingdom of Great Britain and Northern Ireland",
        "GBR",
    ),
    ("United Mexican States", "MEX"),
    ("United Republic of Tanzania", "TZA"),
    ("United States of America", "USA"),
    ("Vatican", "VAT"),
    ("Venezuela", "VEN"),
    ("Vietnam", "VNM"),
    ("Virgin Islands of the United States", "VIR"),
    ("the State of Eritrea", "ERI"),
    ("the State of Palestine", "PSE"),
];

pub fn is_alpha3(code: &str) -> bool {
    COUNTRIES.binary_search_by(|(c, _)| (*c).cmp(code)).is_ok()
}

pub fn region_name(code: &str) -> Option<&'static str> {
    COUNTRIES
        .binary_search_by(|(c, _)| (*c).cmp(code))
        .ok()
        .map(|i| COUNTRIES[i].1)
}

/// Resolves an alpha-3 code (any case) or a country name to its code.
pub fn region_code(name: &str) -> Option<&'static str> {
    let name = name.trim();
    if name.len() == 3 {
        let upper = name.to_ascii_uppercase();
        if let Ok(i) = COUNTRIES.binary_search_by(|(c, _)| (*c).cmp(upper.as_str())) {
            return Some(COUNTRIES[i].0);
        }
    }
    if let Some((code, _)) = COUNTRIES.iter().find(|(_, n)| n.eq_ignore_ascii_case(name)) {
        return Some(code);
    }
    ALIASES
        .iter()
        .find(|(n, _)| n.eq_ignore_ascii_case(name))
        .map(|(_, code)| *code)
}
